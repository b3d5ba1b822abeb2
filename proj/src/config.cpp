#include "ssanc/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ssanc/common.hpp"

namespace ssanc::config {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& v, const std::string& key) {
    char* end = nullptr;
    double x = std::strtod(v.c_str(), &end);
    require(end && *end == '\0' && !v.empty(), "bad number for '" + key + "': " + v);
    return x;
}

int parse_int(const std::string& v, const std::string& key) {
    double x = parse_double(v, key);
    require(x == std::floor(x), "expected integer for '" + key + "': " + v);
    return (int)x;
}

uint64_t parse_u64(const std::string& v, const std::string& key) {
    double x = parse_double(v, key);
    require(x >= 0 && x == std::floor(x), "expected non-negative integer for '" + key + "': " + v);
    return (uint64_t)x;
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("expected true/false for '" + key + "': " + v);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

std::vector<double> parse_double_list(const std::string& v, const std::string& key) {
    std::vector<double> out;
    for (const auto& tok : split(v, ','))
        if (!tok.empty()) out.push_back(parse_double(tok, key));
    return out;
}

std::vector<int> parse_int_list(const std::string& v, const std::string& key) {
    std::vector<int> out;
    for (const auto& tok : split(v, ','))
        if (!tok.empty()) out.push_back(parse_int(tok, key));
    return out;
}

std::array<double, 3> parse_position(const std::string& v, const std::string& key) {
    auto parts = parse_double_list(v, key);
    require(parts.size() == 3, "position '" + key + "' needs 3 coordinates: " + v);
    return {parts[0], parts[1], parts[2]};
}

std::string file_stem(const std::string& path) {
    size_t slash = path.find_last_of("/\\");
    std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
    size_t dot = name.find_last_of('.');
    return dot == std::string::npos ? name : name.substr(0, dot);
}

void apply_source_key(scenario::SourceSpec& s, const std::string& key, const std::string& val) {
    if (key == "azimuth_deg")
        s.azimuth_deg = parse_double(val, key);
    else if (key == "kind")
        s.kind = val;
    else if (key == "seed")
        s.seed = parse_u64(val, key);
    else if (key == "level")
        s.level = parse_double(val, key);
    else if (key == "wav_path")
        s.wav_path = val;
    else
        throw std::invalid_argument("unknown source key '" + key + "'");
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_failure("cannot open config file: " + path);

    ExperimentConfig cfg;
    cfg.scenario_id = file_stem(path);
    cfg.scene.mic_pos.clear();

    std::string section;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        try {
            if (line.front() == '[') {
                require(line.back() == ']', "unterminated section header");
                section = trim(line.substr(1, line.size() - 2));
                if (section == "noise") cfg.scene.noises.emplace_back();
                continue;
            }
            size_t eq = line.find('=');
            require(eq != std::string::npos, "expected key = value");
            std::string key = trim(line.substr(0, eq));
            std::string val = trim(line.substr(eq + 1));
            require(!key.empty(), "empty key");

            if (section == "scene") {
                if (key == "sample_rate_hz")
                    cfg.scene.sample_rate_hz = parse_int(val, key);
                else if (key == "duration_s")
                    cfg.scene.duration_s = parse_double(val, key);
                else if (key == "mic_positions") {
                    for (const auto& tok : split(val, ';'))
                        cfg.scene.mic_pos.push_back(parse_position(tok, key));
                    cfg.scene.K = (int)cfg.scene.mic_pos.size();
                } else if (key == "err_position")
                    cfg.scene.err_pos = parse_position(val, key);
                else if (key == "err_extra_delay_samples")
                    cfg.scene.err_extra_delay_samples = parse_double(val, key);
                else if (key == "source_radius_m")
                    cfg.scene.source_radius_m = parse_double(val, key);
                else if (key == "reference_channel")
                    cfg.scene.reference_channel = parse_int(val, key);
                else if (key == "target_snr_db")
                    cfg.scene.target_leakage_snr_db = parse_double(val, key);
                else
                    throw std::invalid_argument("unknown key '" + key + "' in [scene]");
            } else if (section == "desired") {
                if (key == "paths") {
                    // K mic FIRs then the error-mic FIR, semicolon separated;
                    // overrides the geometric desired-source paths
                    cfg.scene.desired_paths.clear();
                    for (const auto& tok : split(val, ';'))
                        cfg.scene.desired_paths.push_back(parse_double_list(tok, key));
                } else {
                    apply_source_key(cfg.scene.desired, key, val);
                }
            } else if (section == "noise") {
                require(!cfg.scene.noises.empty(), "key outside [noise] section");
                apply_source_key(cfg.scene.noises.back(), key, val);
            } else if (section == "secondary_path") {
                if (key == "length")
                    cfg.scene.g.length = parse_int(val, key);
                else if (key == "bulk_delay")
                    cfg.scene.g.bulk_delay = parse_int(val, key);
                else if (key == "decay_ms")
                    cfg.scene.g.decay_ms = parse_double(val, key);
                else if (key == "minphase")
                    cfg.scene.g.minphase = parse_bool(val, key);
                else if (key == "seed")
                    cfg.scene.g.seed = parse_u64(val, key);
                else
                    throw std::invalid_argument("unknown key '" + key + "' in [secondary_path]");
            } else if (section == "design") {
                if (key == "l_w")
                    cfg.L_w = parse_int(val, key);
                else if (key == "l_h")
                    cfg.L_h = parse_int(val, key);
                else
                    throw std::invalid_argument("unknown key '" + key + "' in [design]");
            } else if (section == "sweep") {
                if (key == "delta_list")
                    cfg.sweep.delta_list = parse_int_list(val, key);
                else if (key == "la_list")
                    cfg.sweep.la_list = parse_int_list(val, key);
                else if (key == "beta_divisors")
                    cfg.sweep.beta_divisors = parse_double_list(val, key);
                else if (key == "rho_divisors")
                    cfg.sweep.rho_divisors = parse_double_list(val, key);
                else
                    throw std::invalid_argument("unknown key '" + key + "' in [sweep]");
            } else if (section == "lms") {
                if (key == "step_size")
                    cfg.lms.step_size = parse_double(val, key);
                else if (key == "probe_duration_s")
                    cfg.lms.probe_duration_s = parse_double(val, key);
                else if (key == "convergence_window_s")
                    cfg.lms.convergence_window_s = parse_double(val, key);
                else if (key == "convergence_threshold")
                    cfg.lms.convergence_threshold = parse_double(val, key);
                else if (key == "probe_seed")
                    cfg.probe_seed = parse_u64(val, key);
                else
                    throw std::invalid_argument("unknown key '" + key + "' in [lms]");
            } else if (section == "run") {
                if (key == "seed")
                    cfg.seed = parse_u64(val, key);
                else if (key == "output_dir")
                    cfg.output_dir = val;
                else if (key == "scenario_id")
                    cfg.scenario_id = val;
                else
                    throw std::invalid_argument("unknown key '" + key + "' in [run]");
            } else {
                throw std::invalid_argument(section.empty() ? "key before any section"
                                                            : "unknown section [" + section + "]");
            }
        } catch (const std::exception& ex) {
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": " + ex.what());
        }
    }
    return cfg;
}

std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
    std::vector<std::string> bad;
    auto flag = [&](const std::string& msg) { bad.push_back(msg); };

    const auto& sc = cfg.scene;
    if (sc.sample_rate_hz <= 0) flag("scene.sample_rate_hz must be positive");
    if (!(sc.duration_s > 0)) flag("scene.duration_s must be positive");
    if (sc.mic_pos.empty()) flag("scene.mic_positions must list at least one microphone");
    if (sc.K != (int)sc.mic_pos.size()) flag("scene mic count disagrees with K");
    if (sc.reference_channel < 0 || sc.reference_channel >= (int)sc.mic_pos.size())
        flag("scene.reference_channel out of range");
    if (!(sc.source_radius_m > 0)) flag("scene.source_radius_m must be positive");
    if (sc.err_extra_delay_samples < 0) flag("scene.err_extra_delay_samples must be >= 0");
    if (!std::isfinite(sc.target_leakage_snr_db)) flag("scene.target_snr_db must be finite");

    auto check_source = [&](const scenario::SourceSpec& s, const std::string& name) {
        if (s.kind != "white" && s.kind != "ar1" && s.kind != "multitone" && s.kind != "wav")
            flag(name + ".kind must be white, ar1, multitone or wav");
        if (s.kind == "wav" && s.wav_path.empty()) flag(name + ".wav_path is required for kind=wav");
        if (!(s.level > 0)) flag(name + ".level must be positive");
    };
    check_source(sc.desired, "desired");
    for (size_t j = 0; j < sc.noises.size(); ++j)
        check_source(sc.noises[j], "noise[" + std::to_string(j) + "]");

    if (!sc.desired_paths.empty()) {
        if (sc.desired_paths.size() != sc.mic_pos.size() + 1)
            flag("desired.paths must hold one FIR per microphone plus the error-mic path");
        for (const auto& p : sc.desired_paths)
            if (p.empty()) {
                flag("desired.paths entries must not be empty");
                break;
            }
    }

    if (sc.g.length < 2) flag("secondary_path.length must be at least 2");
    if (sc.g.bulk_delay < 1) flag("secondary_path.bulk_delay must be at least 1");
    if (sc.g.bulk_delay >= sc.g.length) flag("secondary_path.bulk_delay must be below its length");
    if (!(sc.g.decay_ms > 0)) flag("secondary_path.decay_ms must be positive");

    if (cfg.L_w < 1) flag("design.l_w must be at least 1");
    if (cfg.L_h < 1) flag("design.l_h must be at least 1");

    if (cfg.sweep.delta_list.empty()) flag("sweep.delta_list must not be empty");
    if (cfg.sweep.la_list.empty()) flag("sweep.la_list must not be empty");
    if (cfg.sweep.beta_divisors.empty()) flag("sweep.beta_divisors must not be empty");
    if (cfg.sweep.rho_divisors.empty()) flag("sweep.rho_divisors must not be empty");
    int L = sc.g.length + cfg.L_w - 1;
    for (int d : cfg.sweep.delta_list) {
        if (d < 0) flag("sweep delta " + std::to_string(d) + " must be >= 0");
        if (d > cfg.L_h + L - 2)
            flag("sweep delta " + std::to_string(d) + " exceeds the constraint span L_h + L - 2 = " +
                 std::to_string(cfg.L_h + L - 2));
    }
    for (int la : cfg.sweep.la_list)
        if (la < 0) flag("sweep l_a " + std::to_string(la) + " must be >= 0");
    for (double b : cfg.sweep.beta_divisors)
        if (!(b > 0)) flag("sweep beta_divisor must be positive");
    for (double r : cfg.sweep.rho_divisors)
        if (!(r > 0)) flag("sweep rho_divisor must be positive");

    if (!(cfg.lms.step_size > 0) || cfg.lms.step_size >= 2)
        flag("lms.step_size must lie in (0, 2)");
    if (!(cfg.lms.convergence_threshold > 0)) flag("lms.convergence_threshold must be positive");
    if (!(cfg.lms.convergence_window_s > 0)) flag("lms.convergence_window_s must be positive");
    for (int la : cfg.sweep.la_list) {
        double need = 4.0 * (la + cfg.L_h) / std::max(1, sc.sample_rate_hz);
        if (cfg.lms.probe_duration_s < need) {
            flag("lms.probe_duration_s too short for l_a=" + std::to_string(la) +
                 " (needs at least 4*(l_a+l_h) samples)");
            break;
        }
    }

    // the sample-average covariance needs n >= 2 L windows
    int n = (int)std::llround(sc.duration_s * sc.sample_rate_hz);
    if (n < 2 * L) flag("scene too short for covariance estimation: need duration >= 2*(l_g+l_w-1) samples");

    if (cfg.output_dir.empty()) flag("run.output_dir must not be empty");
    if (cfg.scenario_id.empty()) flag("run.scenario_id must not be empty");
    for (char c : cfg.scenario_id)
        if (c == ',' || c == '\n' || c == '\r') {
            flag("run.scenario_id must not contain commas or newlines");
            break;
        }
    return bad;
}

}  // namespace ssanc::config
