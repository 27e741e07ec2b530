/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: include/morphfuse/io/array_io.hpp
 *
 * Copyright 2026 The morphfuse authors
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
#pragma once

#ifndef MORPHFUSE_IO_ARRAY_IO_HPP
#define MORPHFUSE_IO_ARRAY_IO_HPP

#include <bit>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace morphfuse {
namespace io {

/**
 * Dense n-dimensional double array with column-major element order
 * (first index varies fastest), the layout used by the on-disk format.
 */
struct NdArray
{
    std::vector<std::size_t> dims;
    std::vector<double> data;

    std::size_t element_count() const
    {
        std::size_t count = 1;
        for (const auto d : dims)
        {
            count *= d;
        }
        return count;
    }
};

namespace detail {

constexpr char array_magic[4] = { 'M', 'F', 'A', '1' };

inline void write_u32_le(std::ostream& out, std::uint32_t value)
{
    unsigned char bytes[4];
    for (int i = 0; i < 4; ++i)
    {
        bytes[i] = static_cast<unsigned char>((value >> (8 * i)) & 0xffu);
    }
    out.write(reinterpret_cast<const char*>(bytes), 4);
}

inline void write_u64_le(std::ostream& out, std::uint64_t value)
{
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i)
    {
        bytes[i] = static_cast<unsigned char>((value >> (8 * i)) & 0xffu);
    }
    out.write(reinterpret_cast<const char*>(bytes), 8);
}

inline void write_f64_le(std::ostream& out, double value)
{
    write_u64_le(out, std::bit_cast<std::uint64_t>(value));
}

inline std::uint32_t read_u32_le(std::istream& in, const std::string& path)
{
    unsigned char bytes[4];
    if (!in.read(reinterpret_cast<char*>(bytes), 4))
    {
        throw std::runtime_error(path + ": unexpected end of file in array header");
    }
    std::uint32_t value = 0;
    for (int i = 3; i >= 0; --i)
    {
        value = (value << 8) | bytes[i];
    }
    return value;
}

inline std::uint64_t read_u64_le(std::istream& in, const std::string& path)
{
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8))
    {
        throw std::runtime_error(path + ": unexpected end of file in array header");
    }
    std::uint64_t value = 0;
    for (int i = 7; i >= 0; --i)
    {
        value = (value << 8) | bytes[i];
    }
    return value;
}

} // namespace detail

/**
 * Reads a binary array file: 4-byte magic "MFA1", little-endian uint32
 * dimension count, one little-endian uint64 per dimension, then the
 * elements as little-endian IEEE-754 doubles in column-major order.
 *
 * @throws std::runtime_error on malformed or truncated files.
 */
inline NdArray load_array(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw std::runtime_error(path + ": cannot open file for reading");
    }
    char magic[4];
    if (!in.read(magic, 4) || std::string(magic, 4) != std::string(detail::array_magic, 4))
    {
        throw std::runtime_error(path + ": not an MFA1 array file (bad magic)");
    }
    const std::uint32_t ndim = detail::read_u32_le(in, path);
    if (ndim == 0 || ndim > 8)
    {
        throw std::runtime_error(path + ": unsupported dimension count " + std::to_string(ndim));
    }
    NdArray array;
    array.dims.resize(ndim);
    for (std::uint32_t i = 0; i < ndim; ++i)
    {
        array.dims[i] = static_cast<std::size_t>(detail::read_u64_le(in, path));
    }
    const std::size_t count = array.element_count();
    array.data.resize(count);
    for (std::size_t i = 0; i < count; ++i)
    {
        array.data[i] = std::bit_cast<double>(detail::read_u64_le(in, path));
    }
    // The payload must end exactly where the dims say it does.
    char extra;
    if (in.read(&extra, 1))
    {
        throw std::runtime_error(path + ": trailing bytes after array payload");
    }
    return array;
}

/**
 * Writes an array in the binary format described at load_array().
 *
 * @throws std::invalid_argument if dims and data size disagree;
 *         std::runtime_error on I/O failure.
 */
inline void save_array(const NdArray& array, const std::string& path)
{
    if (array.dims.empty())
    {
        throw std::invalid_argument("save_array: array must have at least one dimension");
    }
    if (array.element_count() != array.data.size())
    {
        throw std::invalid_argument("save_array: dims describe " +
                                    std::to_string(array.element_count()) + " elements but data holds " +
                                    std::to_string(array.data.size()));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        throw std::runtime_error(path + ": cannot open file for writing");
    }
    out.write(detail::array_magic, 4);
    detail::write_u32_le(out, static_cast<std::uint32_t>(array.dims.size()));
    for (const auto d : array.dims)
    {
        detail::write_u64_le(out, static_cast<std::uint64_t>(d));
    }
    for (const auto v : array.data)
    {
        detail::write_f64_le(out, v);
    }
    if (!out)
    {
        throw std::runtime_error(path + ": write failed");
    }
}

/**
 * Views a 2D array as an Eigen matrix (copies; the on-disk order is
 * column-major, matching Eigen's default).
 */
inline Eigen::MatrixXd as_matrix(const NdArray& array)
{
    if (array.dims.size() != 2)
    {
        throw std::invalid_argument("as_matrix: expected a 2-dimensional array, got " +
                                    std::to_string(array.dims.size()) + " dims");
    }
    return Eigen::Map<const Eigen::MatrixXd>(array.data.data(),
                                             static_cast<Eigen::Index>(array.dims[0]),
                                             static_cast<Eigen::Index>(array.dims[1]));
}

/**
 * Views a rank-3 array with dims (V, 3, n) as a (3V, n) basis matrix.
 * Column-major order makes this a pure reinterpretation: entry (v, c, j)
 * lands at row v + V*c of column j.
 */
inline Eigen::MatrixXd as_basis_matrix(const NdArray& array)
{
    if (array.dims.size() != 3 || array.dims[1] != 3)
    {
        throw std::invalid_argument("as_basis_matrix: expected dims (V, 3, n)");
    }
    const auto rows = static_cast<Eigen::Index>(array.dims[0] * 3);
    const auto cols = static_cast<Eigen::Index>(array.dims[2]);
    return Eigen::Map<const Eigen::MatrixXd>(array.data.data(), rows, cols);
}

/// Packs a (3V, n) basis matrix into a rank-3 (V, 3, n) array for saving.
inline NdArray basis_to_array(const Eigen::MatrixXd& basis)
{
    if (basis.rows() % 3 != 0)
    {
        throw std::invalid_argument("basis_to_array: row count must be a multiple of 3");
    }
    NdArray array;
    array.dims = { static_cast<std::size_t>(basis.rows() / 3), 3,
                   static_cast<std::size_t>(basis.cols()) };
    array.data.assign(basis.data(), basis.data() + basis.size());
    return array;
}

/// Packs a plain matrix into a rank-2 array for saving.
inline NdArray matrix_to_array(const Eigen::MatrixXd& matrix)
{
    NdArray array;
    array.dims = { static_cast<std::size_t>(matrix.rows()), static_cast<std::size_t>(matrix.cols()) };
    array.data.assign(matrix.data(), matrix.data() + matrix.size());
    return array;
}

} // namespace io
} // namespace morphfuse

#endif /* MORPHFUSE_IO_ARRAY_IO_HPP */
