#pragma once

#include "sparselab/problem.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace sparselab::io {

/// Headerless numeric CSV, one row per line.
Matrix read_csv_matrix(const std::filesystem::path& path);
/// Single-column CSV (a single row is also accepted).
Vector read_csv_vector(const std::filesystem::path& path);

/// Writes with 17 significant digits so values round-trip exactly.
void write_csv(const std::filesystem::path& path, const Matrix& m);
void write_csv(const std::filesystem::path& path, const Vector& v);

std::string format_scalar(Scalar value);

struct DatasetMetadata {
    Index n = 0;
    Index p = 0;
    std::uint64_t seed = 0;
    bool normalized = false;
    Vector column_scales;
};

/// Writes design.csv, response.csv and metadata.json into dir; beta0 goes to
/// beta.csv when provided.
void write_dataset(const std::filesystem::path& dir, const RegressionProblem& problem, std::uint64_t seed,
                   const Vector* beta0 = nullptr);

RegressionProblem read_problem(const std::filesystem::path& design, const std::filesystem::path& response);

}  // namespace sparselab::io
