#include "ssanc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include "ssanc/bands.hpp"
#include "ssanc/design.hpp"
#include "ssanc/dsp.hpp"
#include "ssanc/metrics.hpp"
#include "ssanc/reir.hpp"
#include "ssanc/svgplot.hpp"

namespace ssanc::experiment {

namespace {

constexpr const char* kHeader =
    "scenario_id,delta,l_a,beta_divisor,rho_divisor,sd_db,nr_db,dsnr_db,solve_time_s,"
    "constraint_residual";

double now_s() {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
}

struct Point {
    int delta, l_a;
    double bd, rho;
};

// everything a sweep point reads; built once per run when caching is on
struct Shared {
    scenario::SceneRealization scene;
    std::vector<double> hp;
    bands::ThirdOctaveBands bt;
    structures::SecondaryPathMatrix G;
    la::Mat Phi_xx;
    std::map<int, structures::ReirMatrix> hmats;  // keyed by l_a
};

Shared build_shared(const config::ExperimentConfig& cfg, const std::vector<int>& la_list,
                    std::vector<std::string>* warnings,
                    std::vector<std::pair<std::string, double>>* prep) {
    Shared sh;
    double t0 = now_s();
    sh.scene = scenario::realize_scene(cfg.scene, cfg.seed);
    if (warnings)
        for (const auto& w : sh.scene.warnings) warnings->push_back(w);
    if (prep) prep->emplace_back("scene", now_s() - t0);

    sh.hp = dsp::min_phase_highpass(100.0, 512, sh.scene.fs());
    sh.bt = bands::builtin_band_table(sh.scene.fs() / 2.0);
    sh.G = structures::build_secondary_path_matrix(sh.scene.g, cfg.L_w, sh.scene.K());

    t0 = now_s();
    std::vector<std::vector<double>> channels;
    for (int k = 0; k < sh.scene.K(); ++k) {
        std::vector<double> mix(sh.scene.n());
        for (int i = 0; i < sh.scene.n(); ++i)
            mix[i] = sh.scene.x_s.ch[k][i] + sh.scene.x_v.ch[k][i];
        channels.push_back(std::move(mix));
    }
    std::vector<double> leak(sh.scene.n());
    for (int i = 0; i < sh.scene.n(); ++i)
        leak[i] = sh.scene.p_s.samples[i] + sh.scene.p_v.samples[i];
    channels.push_back(std::move(leak));
    sh.Phi_xx = design::estimate_covariance(channels, sh.G.L);
    if (prep) prep->emplace_back("covariance", now_s() - t0);

    t0 = now_s();
    auto probe = scenario::probe_scene(cfg.scene, cfg.probe_seed, cfg.lms.probe_duration_s);
    if (prep) prep->emplace_back("probe", now_s() - t0);

    for (int la : la_list) {
        if (sh.hmats.count(la)) continue;
        t0 = now_s();
        std::vector<AcausalFir> taps;
        try {
            taps = reir::estimate_reirs(probe, cfg.scene.reference_channel, la, cfg.L_h, cfg.lms);
        } catch (const convergence_failure& ex) {
            // keep the averaged taps so the sweep can still report this point
            if (warnings) {
                char buf[256];
                std::snprintf(buf, sizeof buf,
                              "reir estimation at l_a=%d stopped above the convergence threshold "
                              "(worst relative change %.3g); using time-averaged taps",
                              la, ex.misalignment);
                warnings->push_back(buf);
            }
            taps = ex.estimates;
        }
        sh.hmats.emplace(la, structures::build_reir_matrix(taps, sh.G.L));
        if (prep) prep->emplace_back("reirs_la" + std::to_string(la), now_s() - t0);
    }
    return sh;
}

void run_point(const Shared& sh, const config::ExperimentConfig& cfg, const Point& pt,
               ResultRow& row) {
    design::DesignSpec spec;
    spec.Delta = pt.delta;
    spec.L_a = pt.l_a;
    spec.L_h = cfg.L_h;
    spec.L_w = cfg.L_w;
    spec.L_g = (int)sh.scene.g.size();
    spec.beta_divisor = pt.bd;
    spec.rho_divisor = pt.rho;
    spec.reference_channel = cfg.scene.reference_channel;

    auto sel = structures::build_selection_vectors(sh.scene.K(), sh.G.L, pt.l_a, cfg.L_h, pt.delta);
    const auto& H = sh.hmats.at(pt.l_a);
    auto sol = design::solve_design(sh.Phi_xx, sh.G, H, sel, spec);

    auto out = scenario::apply_control(sh.scene, sol.w, sh.scene.g, sh.hp, pt.delta);
    auto rep = metrics::evaluate(out, sh.scene.p_s, sh.scene.p_v, sh.bt, sh.G.L + pt.delta);

    row.sd_db = rep.sd_db;
    row.nr_db = rep.nr_db;
    row.dsnr_db = rep.dsnr_db;
    row.solve_time_s = nominal_solve_seconds((sh.scene.K() + 1) * cfg.L_w, H.rows());
    row.constraint_residual = sol.residual_inf;
}

std::string one_line(const std::string& s) {
    std::string out = s;
    for (char& c : out)
        if (c == '\n' || c == '\r') c = ' ';
    return out;
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

int RunResult::failed_rows() const {
    int n = 0;
    for (const auto& r : rows)
        if (!r.error.empty()) ++n;
    return n;
}

double nominal_solve_seconds(int n_filter, int n_constraints) {
    double n = n_filter, r = n_constraints;
    // Cholesky of Phi_rr and S, the multi-RHS solve for X1, the product A X1,
    // and the surrounding vector work
    double flops = n * n * n / 3 + 2 * n * n * r + r * r * n + r * r * r / 3 + 4 * n * n + 2 * n * r;
    return flops / 1e9;
}

RunResult run_experiment(const config::ExperimentConfig& cfg, const RunOptions& opt) {
    RunResult res;

    auto deltas = cfg.sweep.delta_list;
    auto las = cfg.sweep.la_list;
    auto bds = cfg.sweep.beta_divisors;
    auto rhos = cfg.sweep.rho_divisors;
    std::sort(deltas.begin(), deltas.end());
    std::sort(las.begin(), las.end());
    std::sort(bds.begin(), bds.end());
    std::sort(rhos.begin(), rhos.end());

    std::vector<Point> points;
    for (int d : deltas)
        for (int la : las)
            for (double bd : bds)
                for (double rho : rhos) points.push_back({d, la, bd, rho});

    res.rows.resize(points.size());
    res.point_wall_s.assign(points.size(), 0.0);
    for (size_t i = 0; i < points.size(); ++i) {
        auto& r = res.rows[i];
        r.scenario_id = cfg.scenario_id;
        r.delta = points[i].delta;
        r.l_a = points[i].l_a;
        r.beta_divisor = points[i].bd;
        r.rho_divisor = points[i].rho;
    }

    Shared shared;
    if (opt.use_cache) shared = build_shared(cfg, las, &res.warnings, &res.prep_wall_s);

    std::mutex warn_mx;
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (size_t i; (i = next.fetch_add(1)) < points.size();) {
            double t0 = now_s();
            try {
                if (opt.use_cache) {
                    run_point(shared, cfg, points[i], res.rows[i]);
                } else {
                    std::vector<std::string> local_warn;
                    Shared sh = build_shared(cfg, {points[i].l_a}, &local_warn, nullptr);
                    run_point(sh, cfg, points[i], res.rows[i]);
                    std::lock_guard<std::mutex> lk(warn_mx);
                    for (auto& w : local_warn) res.warnings.push_back(std::move(w));
                }
            } catch (const std::exception& ex) {
                res.rows[i].error = one_line(ex.what());
            }
            res.point_wall_s[i] = now_s() - t0;
        }
    };

    int jobs = opt.jobs > 0 ? opt.jobs : (int)std::thread::hardware_concurrency();
    jobs = std::max(1, std::min<int>(jobs, (int)points.size()));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return res;
}

void write_results_csv(const std::string& path, const std::vector<ResultRow>& rows) {
    std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
    if (!out) throw io_failure("cannot write " + path);
    out << kHeader << "\n";
    for (const auto& r : rows) {
        if (!r.error.empty()) out << "# error: " << one_line(r.error) << "\n";
        out << r.scenario_id << ',' << r.delta << ',' << r.l_a << ',' << fmt17(r.beta_divisor)
            << ',' << fmt17(r.rho_divisor) << ',' << fmt17(r.sd_db) << ',' << fmt17(r.nr_db) << ','
            << fmt17(r.dsnr_db) << ',' << fmt17(r.solve_time_s) << ','
            << fmt17(r.constraint_residual) << "\n";
    }
    if (!out) throw io_failure("write failed: " + path);
}

std::vector<ResultRow> read_results_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_failure("cannot open " + path);
    std::vector<ResultRow> rows;
    std::string line, pending_error;
    bool header_seen = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.rfind("# error: ", 0) == 0) {
            pending_error = line.substr(9);
            continue;
        }
        if (line[0] == '#') continue;
        if (!header_seen) {
            if (line != kHeader) throw io_failure(path + ": unexpected header: " + line);
            header_seen = true;
            continue;
        }
        std::vector<std::string> f;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                f.push_back(cur);
                cur.clear();
            } else
                cur += c;
        }
        f.push_back(cur);
        if (f.size() != 10)
            throw io_failure(path + ":" + std::to_string(lineno) + ": expected 10 fields");
        auto num = [&](int idx) { return std::strtod(f[idx].c_str(), nullptr); };
        ResultRow r;
        r.scenario_id = f[0];
        r.delta = (int)std::strtol(f[1].c_str(), nullptr, 10);
        r.l_a = (int)std::strtol(f[2].c_str(), nullptr, 10);
        r.beta_divisor = num(3);
        r.rho_divisor = num(4);
        r.sd_db = num(5);
        r.nr_db = num(6);
        r.dsnr_db = num(7);
        r.solve_time_s = num(8);
        r.constraint_residual = num(9);
        r.error = pending_error;
        pending_error.clear();
        rows.push_back(std::move(r));
    }
    if (!header_seen) throw io_failure(path + ": missing header");
    return rows;
}

void write_timings_csv(const std::string& path, const RunResult& run) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_failure("cannot write " + path);
    for (const auto& [name, secs] : run.prep_wall_s)
        out << "# prep " << name << " " << fmt17(secs) << "\n";
    out << "scenario_id,delta,l_a,beta_divisor,rho_divisor,wall_s\n";
    for (size_t i = 0; i < run.rows.size(); ++i) {
        const auto& r = run.rows[i];
        double w = i < run.point_wall_s.size() ? run.point_wall_s[i] : 0.0;
        out << r.scenario_id << ',' << r.delta << ',' << r.l_a << ',' << fmt17(r.beta_divisor)
            << ',' << fmt17(r.rho_divisor) << ',' << fmt17(w) << "\n";
    }
}

namespace {

struct MetricDef {
    const char* name;
    const char* label;
    double ResultRow::*field;
};

constexpr MetricDef kMetrics[] = {
    {"sd", "speech distortion (dB)", &ResultRow::sd_db},
    {"nr", "noise reduction (dB)", &ResultRow::nr_db},
    {"dsnr", "SNR improvement (dB)", &ResultRow::dsnr_db},
};

bool value_capped(double v) { return std::fabs(v) == 300.0; }

std::string series_label(const ResultRow& r, bool many_bd, bool many_rho, bool with_la) {
    char buf[128];
    std::string s;
    if (with_la) {
        std::snprintf(buf, sizeof buf, "L_a=%d", r.l_a);
        s = buf;
    }
    if (many_bd) {
        std::snprintf(buf, sizeof buf, "%sdiv=%g", s.empty() ? "" : " ", r.beta_divisor);
        s += buf;
    }
    if (many_rho) {
        std::snprintf(buf, sizeof buf, "%srho=%g", s.empty() ? "" : " ", r.rho_divisor);
        s += buf;
    }
    if (s.empty()) s = "design";
    return s;
}

}  // namespace

void emit_plots(const std::string& dir, const std::vector<ResultRow>& rows, int sample_rate_hz) {
    std::vector<const ResultRow*> good;
    for (const auto& r : rows)
        if (r.error.empty() && std::isfinite(r.sd_db)) good.push_back(&r);
    if (good.empty()) return;

    std::vector<int> deltas, las;
    std::vector<double> bds, rhos;
    for (auto* r : good) {
        deltas.push_back(r->delta);
        las.push_back(r->l_a);
        bds.push_back(r->beta_divisor);
        rhos.push_back(r->rho_divisor);
    }
    auto uniq = [](auto& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    uniq(deltas);
    uniq(las);
    uniq(bds);
    uniq(rhos);
    double ms = 1000.0 / std::max(1, sample_rate_hz);
    const std::string id = good.front()->scenario_id;

    for (const auto& m : kMetrics) {
        // metric against the constraint delay, one series per acausal extent
        svgplot::Plot plot;
        plot.title = id + ": " + m.name + " vs delay";
        plot.x_label = "Delta (samples)";
        plot.y_label = m.label;
        plot.x_ms_per_unit = ms;
        std::map<std::string, svgplot::Series> by_label;
        for (auto* r : good) {
            auto lbl = series_label(*r, bds.size() > 1, rhos.size() > 1, true);
            auto& s = by_label[lbl];
            s.label = lbl;
            s.x.push_back(r->delta);
            s.y.push_back(r->*(m.field));
            s.capped.push_back(value_capped(r->*(m.field)));
        }
        for (auto& [lbl, s] : by_label) plot.series.push_back(std::move(s));
        svgplot::write_svg(dir + "/" + m.name + "_vs_delta.svg", plot);

        if (las.size() > 1) {
            // metric against the acausal extent at the largest swept delay
            int fixed = deltas.back();
            svgplot::Plot p2;
            char tbuf[160];
            std::snprintf(tbuf, sizeof tbuf, "%s: %s vs acausal extent (Delta=%d)", id.c_str(),
                          m.name, fixed);
            p2.title = tbuf;
            p2.x_label = "L_a (samples)";
            p2.y_label = m.label;
            p2.x_ms_per_unit = ms;
            std::map<std::string, svgplot::Series> s2;
            for (auto* r : good) {
                if (r->delta != fixed) continue;
                auto lbl = series_label(*r, bds.size() > 1, rhos.size() > 1, false);
                auto& s = s2[lbl];
                s.label = lbl;
                s.x.push_back(r->l_a);
                s.y.push_back(r->*(m.field));
                s.capped.push_back(value_capped(r->*(m.field)));
            }
            for (auto& [lbl, s] : s2) p2.series.push_back(std::move(s));
            svgplot::write_svg(dir + "/" + m.name + "_vs_la.svg", p2);
        }
    }
}

void emit_results(const std::string& dir, const RunResult& run, int sample_rate_hz) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw io_failure("cannot create output directory " + dir + ": " + ec.message());
    write_results_csv(dir + "/results.csv", run.rows);
    write_timings_csv(dir + "/timings.csv", run);
    emit_plots(dir, run.rows, sample_rate_hz);
}

}  // namespace ssanc::experiment
