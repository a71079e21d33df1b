#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "nbt/cli/config.hpp"
#include "nbt/cli/output.hpp"
#include "nbt/cli/run.hpp"

int main(int argc, char** argv) {
    using namespace nbt::cli;
    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        const auto parsed = parse_arguments(args);
        if (parsed.help) {
            std::fputs(parsed.help_text.c_str(), stdout);
            return 0;
        }
        const auto out = run_sweep(parsed.config);
        const auto artifacts = emit_all(out);
        for (const auto& s : out.series)
            if (!s.error.empty())
                std::fprintf(stderr, "warning: %s = %g skipped: %s\n", std::string(to_string(s.param)).c_str(), s.value,
                             s.error.c_str());
        const std::size_t failed = out.failed_points();
        if (failed) std::fprintf(stderr, "warning: %zu of %zu points failed (see *.errors.csv)\n", failed, out.total_points());
        for (const auto& a : artifacts) std::printf("%s/%s\n", parsed.config.output_dir.c_str(), a.path.c_str());
        return failed == out.total_points() ? 1 : 0;
    } catch (const UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
