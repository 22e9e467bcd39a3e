#pragma once

#include "kdual/io.hpp"

#include <string>
#include <vector>

namespace kdual::cli {

struct Outcome {
        nlohmann::json report;
        int exit_code = 0; /* 0 pass, 1 check failure, 2 input error */
};

struct BuildArgs {
        std::string object; /* costandard | standard | simple | injective */
        std::string face = "o";
        int twist = 0;
        std::string variant = "tau";
};

struct CheckArgs {
        std::string kind; /* purity | koszulity | duality | bbfk | all */
        unsigned jobs = 1;
        int twist_range = -1; /* -1: default 2n */
        bool timing = false;
};

FaceId parse_face(const Fan &fan, const std::string &spec);

Outcome cmd_fan_info(const std::string &path);
Outcome cmd_fan_dualize(const std::string &path);
Outcome cmd_build(const std::string &path, const BuildArgs &args);
Outcome cmd_check(const std::string &path, const CheckArgs &args);

/* Deterministic serialization used for all reports. */
std::string render(const nlohmann::json &report);

} // namespace kdual::cli
