// Writes one of the built-in synthetic projects as input files.
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "refrev/errors.hpp"
#include "refrev/fixtures.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Write a built-in synthetic project (facts.json, commits.jsonl, activity.json)", "refrev-fixtures"};
    std::string name, dir;
    app.add_option("name", name, "micro, busy-experts or common-reviewer")->required();
    app.add_option("dir", dir, "Output directory")->required();
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 3;
    }
    try {
        refrev::write_fixture(refrev::fixture_by_name(name), dir);
    } catch (const refrev::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const refrev::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    }
    std::cout << "wrote " << name << " to " << dir << "\n";
    return 0;
}
