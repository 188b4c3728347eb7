#include "polysim/stdmodels/models.hpp"
#include "polysim/topology/parser.hpp"

namespace polysim::stdmodels {

namespace {

const char* kLibrary = R"(// Standard model library.

simple TicToc {
    parameters:
        bool starter = false;
    gates:
        input in;
        output out;
}

simple PingClient {
    parameters:
        time interval = 1s;
        int count = 10;
        int packetBytes = 64;
    gates:
        input in;
        output out;
}

simple PingServer {
    gates:
        input in;
        output out;
}

simple LinkLayer {
    gates:
        input upperIn[4];
        output upperOut[4];
        input lowerIn;
        output lowerOut;
}

simple DropTailQueue {
    parameters:
        int capacity = 0;    // 0: unbounded
    gates:
        input in;
        output out;
        input reqIn;
}

simple SimpleMac {
    gates:
        input upperIn;
        output upperOut;
        output reqOut;
        input phyIn;
        output phyOut;
}

simple EchoServer {
    parameters:
        int protocolId = 34997;
    gates:
        input in;
        output out;
}

simple EtherClient {
    parameters:
        int address;
        int dest;
        int protocolId = 34997;
        int count = 1;
        int payloadBytes = 46;
        time interval = 1ms;
    gates:
        input in;
        output out;
}

// gate shape shared by applications that sit on a LinkLayer
simple IEtherApp {
    gates:
        input in;
        output out;
}

simple TicTocGuest {
    @class("guest:ref.TicTocGuest");
    parameters:
        bool starter = false;
    gates:
        input in;
        output out;
}

simple PingClientGuest {
    @class("guest:ref.PingClientGuest");
    parameters:
        time interval = 1s;
        int count = 10;
        int packetBytes = 64;
    gates:
        input in;
        output out;
}

simple EchoServerGuest {
    @class("guest:ref.EchoServerGuest");
    parameters:
        int protocolId = 34997;
    gates:
        input in;
        output out;
}

module EtherHostN {
    parameters:
        string appType = "EchoServer";
    gates:
        input ethIn;
        output ethOut;
    submodules:
        app: <appType> like IEtherApp;
        llc: LinkLayer;
        queue: DropTailQueue;
        mac: SimpleMac;
    connections:
        app.out --> llc.upperIn[0];
        llc.upperOut[0] --> app.in;
        llc.lowerOut --> queue.in;
        queue.out --> mac.upperIn;
        mac.reqOut --> queue.reqIn;
        mac.upperOut --> llc.lowerIn;
        mac.phyOut --> ethOut;
        ethIn --> mac.phyIn;
}

module EtherHostG {
    parameters:
        string appType = "EchoServerGuest";
    gates:
        input ethIn;
        output ethOut;
    submodules:
        app: <appType> like IEtherApp;
        llc: LinkLayer;
        queue: DropTailQueue;
        mac: SimpleMac;
    connections:
        app.out --> llc.upperIn[0];
        llc.upperOut[0] --> app.in;
        llc.lowerOut --> queue.in;
        queue.out --> mac.upperIn;
        mac.reqOut --> queue.reqIn;
        mac.upperOut --> llc.lowerIn;
        mac.phyOut --> ethOut;
        ethIn --> mac.phyIn;
}
)";

template <class T>
topo::NativeFactory factory() {
    return [] { return std::make_unique<T>(); };
}

} // namespace

std::string_view library_source() { return kLibrary; }

void register_stdmodels(topo::ModuleTypeRegistry& registry) {
    registry.add_library(topo::parse_topology(kLibrary, "<stdmodels>"));
    registry.add_native("TicToc", factory<TicToc>());
    registry.add_native("PingClient", factory<PingClient>());
    registry.add_native("PingServer", factory<PingServer>());
    registry.add_native("LinkLayer", factory<LinkLayer>());
    registry.add_native("DropTailQueue", factory<DropTailQueue>());
    registry.add_native("SimpleMac", factory<SimpleMac>());
    registry.add_native("EchoServer", factory<EchoServer>());
    registry.add_native("EtherClient", factory<EtherClient>());
}

} // namespace polysim::stdmodels
