#include <iostream>

#include "CLI11.hpp"

int main(int argc, char** argv) {
    CLI::App app{"ringq: colored stochastic vertex weights and ring dynamics"};
    app.require_subcommand(0, 1);
    CLI11_PARSE(app, argc, argv);
    if (app.get_subcommands().empty()) {
        std::cout << app.help() << std::endl;
        return 0;
    }
    return 0;
}
