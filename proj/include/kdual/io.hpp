#pragma once

#include "kdual/dcat.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>

namespace kdual {

struct InputError : std::runtime_error {
        using std::runtime_error::runtime_error;
};

struct CompletionEntry {
        std::vector<QVector> rays;  /* generators of the face; empty list = origin */
        std::vector<QVector> basis; /* spanning vectors of Phi at that face */
};

struct FanFile {
        std::string name;
        std::size_t ambient_dim = 0;
        std::vector<std::vector<QVector>> cones;
        std::optional<std::vector<CompletionEntry>> completion;
};

FanFile parse_fan_file(const std::string &text);
FanFile read_fan_file(const std::string &path);
nlohmann::json fan_file_json(const FanFile &f);

struct LoadedFan {
        std::shared_ptr<const Fan> fan;
        ContextPtr ctx;
};
LoadedFan load_fan(const FanFile &f);

/* FanFile for a fan given as the face lattice of its maximal cones, with its completion. */
FanFile fan_to_file(const Fan &fan, const Completion &phi, std::string name);

nlohmann::json rational_json(const Rational &q);
Rational rational_from_json(const nlohmann::json &j);

nlohmann::json complex_json(const InjComplex &s);
InjComplex complex_from_json(const ContextPtr &ctx, const nlohmann::json &j);
nlohmann::json dims_json(const BigradedDims &d);

std::string fnv1a_hex(const std::string &bytes);
std::string read_text(const std::string &path);

} // namespace kdual
