#include "sparselab/io.hpp"

#include "sparselab/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace sparselab::io {

namespace {

std::vector<std::vector<Scalar>> read_rows(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw InvalidArgument("cannot open '" + path.string() + "'");
    }
    std::vector<std::vector<Scalar>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        std::vector<Scalar> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            const auto first = cell.find_first_not_of(" \t");
            const auto last = cell.find_last_not_of(" \t");
            if (first == std::string::npos) {
                throw InvalidArgument(path.string() + ":" + std::to_string(line_no) + ": empty field");
            }
            const std::string token = cell.substr(first, last - first + 1);
            char* end = nullptr;
            const Scalar value = std::strtod(token.c_str(), &end);
            if (end != token.c_str() + token.size()) {
                throw InvalidArgument(path.string() + ":" + std::to_string(line_no) + ": not a number '" +
                                      token + "'");
            }
            row.push_back(value);
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw InvalidArgument(path.string() + ":" + std::to_string(line_no) + ": ragged row");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw InvalidArgument("'" + path.string() + "' contains no data");
    }
    return rows;
}

}  // namespace

Matrix read_csv_matrix(const std::filesystem::path& path)
{
    const auto rows = read_rows(path);
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
        }
    }
    return m;
}

Vector read_csv_vector(const std::filesystem::path& path)
{
    const Matrix m = read_csv_matrix(path);
    if (m.cols() == 1) {
        return m.col(0);
    }
    if (m.rows() == 1) {
        return m.row(0).transpose();
    }
    throw InvalidArgument("'" + path.string() + "' is not a single column");
}

std::string format_scalar(Scalar value)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void write_csv(const std::filesystem::path& path, const Matrix& m)
{
    std::ofstream out(path);
    if (!out) {
        throw InvalidArgument("cannot write '" + path.string() + "'");
    }
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j > 0) {
                out << ',';
            }
            out << format_scalar(m(i, j));
        }
        out << '\n';
    }
}

void write_csv(const std::filesystem::path& path, const Vector& v)
{
    write_csv(path, Matrix(v));
}

void write_dataset(const std::filesystem::path& dir, const RegressionProblem& problem, std::uint64_t seed,
                   const Vector* beta0)
{
    std::filesystem::create_directories(dir);
    write_csv(dir / "design.csv", problem.design());
    write_csv(dir / "response.csv", problem.response());
    if (beta0 != nullptr) {
        write_csv(dir / "beta.csv", *beta0);
    }
    DatasetMetadata meta{problem.n(), problem.p(), seed, problem.normalized(), problem.column_scales()};
    std::ofstream out(dir / "metadata.json");
    out << dump(to_json(meta)) << '\n';
}

RegressionProblem read_problem(const std::filesystem::path& design, const std::filesystem::path& response)
{
    return RegressionProblem(read_csv_matrix(design), read_csv_vector(response));
}

}  // namespace sparselab::io
