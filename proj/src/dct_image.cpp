/*
 * Copyright (c) 2026 the pegamp authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include "pegamp/harness.hpp"

namespace pegamp {
namespace {

constexpr double kPi = 3.14159265358979323846;

// C = A * B for row-major side x side matrices; transpose_b multiplies by
// B^T instead.
std::vector<double> matmul(const std::vector<double>& a,
                           const std::vector<double>& b, std::size_t side,
                           bool transpose_b) {
  std::vector<double> c(side * side, 0.0);
  for (std::size_t i = 0; i < side; ++i) {
    for (std::size_t j = 0; j < side; ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < side; ++k) {
        const double bkj = transpose_b ? b[j * side + k] : b[k * side + j];
        sum += a[i * side + k] * bkj;
      }
      c[i * side + j] = sum;
    }
  }
  return c;
}

std::vector<double> matmul_at_b(const std::vector<double>& a,
                                const std::vector<double>& b,
                                std::size_t side) {
  std::vector<double> c(side * side, 0.0);
  for (std::size_t i = 0; i < side; ++i) {
    for (std::size_t j = 0; j < side; ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < side; ++k)
        sum += a[k * side + i] * b[k * side + j];
      c[i * side + j] = sum;
    }
  }
  return c;
}

// Reads the next whitespace-separated token, skipping '#' comments.
std::string next_pgm_token(std::istream& is) {
  std::string token;
  while (is >> token) {
    if (token[0] != '#') return token;
    std::string rest;
    std::getline(is, rest);
  }
  throw std::invalid_argument("truncated image file");
}

}  // namespace

Dct2Basis::Dct2Basis(std::size_t side) : side_(side) {
  if (side == 0) throw std::invalid_argument("empty operator");
  transform_.resize(side * side);
  const auto k = static_cast<double>(side);
  const double dc = std::sqrt(1.0 / k);
  const double ac = std::sqrt(2.0 / k);
  for (std::size_t i = 0; i < side; ++i) {
    for (std::size_t j = 0; j < side; ++j) {
      transform_[i * side + j] =
          i == 0 ? dc
                 : ac * std::cos(kPi * (2.0 * static_cast<double>(j) + 1.0) *
                                 static_cast<double>(i) / (2.0 * k));
    }
  }
}

std::vector<double> Dct2Basis::analyze(std::span<const double> image) const {
  if (image.size() != side_ * side_)
    throw std::invalid_argument("mismatched lengths");
  const std::vector<double> img(image.begin(), image.end());
  // coefficients = T * image * T^T
  return matmul(matmul(transform_, img, side_, false), transform_, side_,
                true);
}

std::vector<double> Dct2Basis::synthesize(
    std::span<const double> coefficients) const {
  if (coefficients.size() != side_ * side_)
    throw std::invalid_argument("mismatched lengths");
  const std::vector<double> coef(coefficients.begin(), coefficients.end());
  // image = T^T * coefficients * T
  return matmul(matmul_at_b(transform_, coef, side_), transform_, side_,
                false);
}

std::vector<double> read_pgm(const std::string& path, std::size_t& side) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open file: " + path);
  if (next_pgm_token(is) != "P2")
    throw std::invalid_argument("unsupported image format");
  const auto width = std::stoul(next_pgm_token(is));
  const auto height = std::stoul(next_pgm_token(is));
  const auto maxval = std::stoul(next_pgm_token(is));
  if (width != height || width == 0)
    throw std::invalid_argument("image not square");
  if (width > 64) throw std::invalid_argument("image too large");
  if (maxval == 0 || maxval > 65535)
    throw std::invalid_argument("unsupported image format");
  side = width;
  std::vector<double> image(width * height);
  for (double& pixel : image) pixel = std::stod(next_pgm_token(is));
  return image;
}

void write_pgm(const std::string& path, std::span<const double> image,
               std::size_t side) {
  if (side == 0 || image.size() != side * side)
    throw std::invalid_argument("image not square");
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open file: " + path);
  os << "P2\n" << side << ' ' << side << "\n255\n";
  for (std::size_t i = 0; i < side; ++i) {
    for (std::size_t j = 0; j < side; ++j) {
      const double value = std::clamp(image[i * side + j], 0.0, 255.0);
      os << static_cast<int>(std::lround(value));
      os << (j + 1 == side ? '\n' : ' ');
    }
  }
  if (!os) throw std::runtime_error("cannot write file: " + path);
}

}  // namespace pegamp
