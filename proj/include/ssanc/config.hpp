#pragma once

#include <string>
#include <vector>

#include "ssanc/design.hpp"
#include "ssanc/reir.hpp"
#include "ssanc/scenario.hpp"

namespace ssanc::config {

struct SweepSpec {
    std::vector<int> delta_list;
    std::vector<int> la_list;
    std::vector<double> beta_divisors;
    std::vector<double> rho_divisors;
};

struct ExperimentConfig {
    std::string scenario_id;  // defaults to the config file stem
    scenario::SceneConfig scene;
    int L_w = 128;
    int L_h = 64;
    SweepSpec sweep;
    reir::LmsConfig lms;
    uint64_t probe_seed = 77;
    uint64_t seed = 1;
    std::string output_dir = "out";
};

// sectioned key=value text; '#' starts a comment; [noise] may repeat
ExperimentConfig load_config(const std::string& path);

// every violated invariant, one message per entry; empty means valid
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

}  // namespace ssanc::config
