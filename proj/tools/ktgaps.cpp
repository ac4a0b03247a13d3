#include <atomic>
#include <csignal>
#include <iostream>

#include "ktgaps/cli.hpp"

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_interrupt(int) { g_stop.store(true); }

} // namespace

int main(int argc, char** argv) {
    int exit_code = 0;
    auto config = ktgaps::cli::parse_command_line(argc, argv, std::cout, std::cerr, exit_code);
    if (!config) return exit_code;
    std::signal(SIGINT, on_interrupt);
    std::signal(SIGTERM, on_interrupt);
    return ktgaps::cli::run(*config, std::cout, std::cerr, &g_stop);
}
