#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "ssanc/config.hpp"
#include "ssanc/experiment.hpp"

namespace {

void usage() {
    std::fprintf(stderr,
                 "usage:\n"
                 "  ssanc validate <config>\n"
                 "  ssanc run <config> [--jobs N] [--out DIR] [--seed S]\n"
                 "  ssanc plot <results.csv> [--out DIR] [--fs HZ]\n"
                 "\n"
                 "exit codes: 0 ok, 1 config error, 2 runtime error, 3 i/o error\n");
}

bool take_value(const std::vector<std::string>& args, size_t& i, const char* flag,
                std::string& out) {
    if (args[i] != flag) return false;
    if (i + 1 >= args.size()) throw std::invalid_argument(std::string(flag) + " needs a value");
    out = args[++i];
    return true;
}

int cmd_validate(const std::vector<std::string>& args) {
    if (args.size() != 1) {
        usage();
        return 1;
    }
    auto cfg = ssanc::config::load_config(args[0]);
    auto bad = ssanc::config::validate_config(cfg);
    for (const auto& msg : bad) std::fprintf(stderr, "invalid: %s\n", msg.c_str());
    if (!bad.empty()) {
        std::fprintf(stderr, "%zu problem(s) found\n", bad.size());
        return 1;
    }
    std::printf("%s: ok (%zu sweep points)\n", cfg.scenario_id.c_str(),
                cfg.sweep.delta_list.size() * cfg.sweep.la_list.size() *
                    cfg.sweep.beta_divisors.size() * cfg.sweep.rho_divisors.size());
    return 0;
}

int cmd_run(const std::vector<std::string>& args) {
    if (args.empty()) {
        usage();
        return 1;
    }
    auto cfg = ssanc::config::load_config(args[0]);
    ssanc::experiment::RunOptions opt;
    std::string val;
    for (size_t i = 1; i < args.size(); ++i) {
        if (take_value(args, i, "--jobs", val))
            opt.jobs = std::atoi(val.c_str());
        else if (take_value(args, i, "--out", val))
            cfg.output_dir = val;
        else if (take_value(args, i, "--seed", val))
            cfg.seed = std::strtoull(val.c_str(), nullptr, 10);
        else
            throw std::invalid_argument("unknown option " + args[i]);
    }
    auto bad = ssanc::config::validate_config(cfg);
    for (const auto& msg : bad) std::fprintf(stderr, "invalid: %s\n", msg.c_str());
    if (!bad.empty()) return 1;

    auto run = ssanc::experiment::run_experiment(cfg, opt);
    for (const auto& w : run.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    ssanc::experiment::emit_results(cfg.output_dir, run, cfg.scene.sample_rate_hz);

    for (const auto& r : run.rows) {
        if (!r.error.empty()) {
            std::printf("delta=%-3d l_a=%-3d div=%-8g rho=%-8g FAILED: %s\n", r.delta, r.l_a,
                        r.beta_divisor, r.rho_divisor, r.error.c_str());
        } else {
            std::printf("delta=%-3d l_a=%-3d div=%-8g rho=%-8g sd=%8.3f nr=%8.3f dsnr=%8.3f "
                        "resid=%.3e\n",
                        r.delta, r.l_a, r.beta_divisor, r.rho_divisor, r.sd_db, r.nr_db, r.dsnr_db,
                        r.constraint_residual);
        }
    }
    int failed = run.failed_rows();
    std::printf("%zu rows (%d failed) -> %s/results.csv\n", run.rows.size(), failed,
                cfg.output_dir.c_str());
    return failed > 0 ? 2 : 0;
}

int cmd_plot(const std::vector<std::string>& args) {
    if (args.empty()) {
        usage();
        return 1;
    }
    std::string out_dir = ".";
    int fs = 16000;
    std::string val;
    for (size_t i = 1; i < args.size(); ++i) {
        if (take_value(args, i, "--out", val))
            out_dir = val;
        else if (take_value(args, i, "--fs", val))
            fs = std::atoi(val.c_str());
        else
            throw std::invalid_argument("unknown option " + args[i]);
    }
    auto rows = ssanc::experiment::read_results_csv(args[0]);
    ssanc::experiment::emit_plots(out_dir, rows, fs);
    std::printf("plots for %zu rows -> %s\n", rows.size(), out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty()) {
        usage();
        return 1;
    }
    std::string cmd = args[0];
    args.erase(args.begin());
    try {
        if (cmd == "validate") return cmd_validate(args);
        if (cmd == "run") return cmd_run(args);
        if (cmd == "plot") return cmd_plot(args);
        usage();
        return 1;
    } catch (const ssanc::io_failure& ex) {
        std::fprintf(stderr, "i/o error: %s\n", ex.what());
        return 3;
    } catch (const std::invalid_argument& ex) {
        std::fprintf(stderr, "config error: %s\n", ex.what());
        return 1;
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 2;
    }
}
