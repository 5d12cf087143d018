#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace pvsde {

std::string base64_encode(std::string_view bytes);
std::string base64_decode(std::string_view text);

/// Little-endian float64 bytes of a matrix in row-major order, base64 encoded.
std::string encode_matrix(const Eigen::MatrixXd& m);
Eigen::MatrixXd decode_matrix(std::string_view text, Eigen::Index rows, Eigen::Index cols);

std::string encode_vector(const Eigen::VectorXd& v);
Eigen::VectorXd decode_vector(std::string_view text, Eigen::Index size);

/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace pvsde
