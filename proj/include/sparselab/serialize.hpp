#pragma once

// JSON views of the library's results. Keys keep insertion order so output
// is byte-stable; non-finite numbers are written as null.

#include "sparselab/conditions.hpp"
#include "sparselab/cv.hpp"
#include "sparselab/experiments.hpp"
#include "sparselab/io.hpp"
#include "sparselab/model_analysis.hpp"

#include <json.hpp>

#include <string>

namespace sparselab {

using Json = nlohmann::ordered_json;

Json number(Scalar value);
Json to_json(const Vector& values);
Json to_json(const IndexSet& indices);

Json to_json(const io::DatasetMetadata& meta);
Json to_json(const FitResult& fit);
Json to_json(const ConditionReport& report);
Json to_json(const RepresentationFamily& family);
Json to_json(const ImportanceReport& report);
Json to_json(const CvResult& result);
Json to_json(const ExperimentConfig& config);
Json to_json(const RateStudyResult& result);
Json to_json(const ComparisonConfig& config);
Json to_json(const ComparisonTable& table);

/// Overlays keys present in `j` onto `config`; unknown keys are rejected.
void update_from_json(const Json& j, ExperimentConfig& config);
void update_from_json(const Json& j, ComparisonConfig& config);

/// Two-space indented text, no trailing newline.
std::string dump(const Json& j);

}  // namespace sparselab
