// bindgen: kernel API manifest -> guest stubs + registration table.

#include "polysim/bindgen/bindgen.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

bool write_file(const std::string& path, const std::string& text) {
    const auto parent = std::filesystem::path(path).parent_path();
    std::error_code ec;
    if (!parent.empty()) std::filesystem::create_directories(parent, ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    return static_cast<bool>(out);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generate guest stubs and the registration table from an API manifest"};
    std::string manifest, stubs_out, table_out;
    app.add_option("--manifest", manifest, "API manifest")->required()->check(CLI::ExistingFile);
    app.add_option("--stubs-out", stubs_out, "Python stub module to write")->required();
    app.add_option("--table-out", table_out, "registration table to write")->required();
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    using polysim::bindgen::BindErrc;
    try {
        const auto generated = polysim::bindgen::generate(polysim::bindgen::load_manifest_file(manifest));
        if (!write_file(stubs_out, generated.stub_source) ||
            !write_file(table_out, polysim::abi::format_table(generated.table))) {
            std::cerr << "bindgen: cannot write output files\n";
            return 1;
        }
        std::cout << "bindgen: " << generated.stub_count << " wrappers, " << generated.table.entries.size()
                  << " table entries\n";
    } catch (const polysim::bindgen::BindgenError& e) {
        std::cerr << manifest << ": " << e.what() << "\n";
        return e.code() == BindErrc::CollisionUnresolvable ? 3 : 2;
    }
    return 0;
}
