#ifndef PJD_CONFIG_HPP
#define PJD_CONFIG_HPP

#include <string>

#include "json.hpp"
#include "pjd/affine.hpp"
#include "pjd/models.hpp"
#include "pjd/transform.hpp"

namespace pjd::config {

using nlohmann::json;

/// Strict parsing: unknown keys anywhere in a document are rejected with a
/// path-qualified ConfigError.

json poly_to_json(const Poly& p);
Poly poly_from_json(const json& j, int dim, const std::string& path);

json marks_to_json(const MarkDist& m);
MarkDist marks_from_json(const json& j, const std::string& path);

json stream_to_json(const JumpStream& s);
JumpStream stream_from_json(const json& j, int dim, const std::string& path);

json domain_to_json(const StateDomain& d);
StateDomain domain_from_json(const json& j, const std::string& path);

json generator_to_json(const GeneratorSpec& s);
GeneratorSpec generator_from_json(const json& j, const std::string& path = "$");

json augmented_to_json(const AugmentedSpec& s);
AugmentedSpec augmented_from_json(const json& j, const std::string& path = "$");

json subordinator_to_json(const SubordinatorSpec& s);
SubordinatorSpec subordinator_from_json(const json& j, const std::string& path = "$");

json affine_to_json(const AffineSpec& s);
AffineSpec affine_from_json(const json& j, const std::string& path = "$");

json model_to_json(const ModelSpec& m);
ModelSpec model_from_json(const json& j, const std::string& path = "$");

/// Top-level document: {"type": "model" | "generator" | "augmented", ...}.
struct Document {
    enum class Type { model, generator, augmented };
    Type type = Type::model;
    ModelSpec model;
    GeneratorSpec generator;
    AugmentedSpec augmented;
};

Document document_from_json(const json& j);
json document_to_json(const Document& d);

/// Parse with position-carrying errors.
json parse(const std::string& text);
json load_file(const std::string& file);

/// Apply a dotted-path override ("factor.x0.0=0.25"); the path must exist
/// and the replacement must keep the JSON type.
void apply_override(json& doc, const std::string& assignment);

/// Sorted keys, floats at 17 significant digits: byte-stable across runs.
std::string canonical_dump(const json& j, int indent = -1);

/// FNV-1a 64-bit hash of the canonical serialization, hex-encoded.
std::string config_hash(const json& j);

} // namespace pjd::config

#endif
