/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: include/morphfuse/io/pgm.hpp
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

#ifndef MORPHFUSE_IO_PGM_HPP
#define MORPHFUSE_IO_PGM_HPP

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace morphfuse {
namespace io {

/// Grey-scale image as parsed from a plain (P2) PGM file.
struct PgmImage
{
    int rows = 0;
    int cols = 0;
    int maxval = 255;
    std::vector<int> pixels; // row-major, rows*cols entries

    int at(int r, int c) const { return pixels[static_cast<std::size_t>(r) * cols + c]; }
};

namespace detail {

/// Pulls whitespace-separated tokens, skipping '#' comments, tracking the line number.
class PgmTokenizer
{
public:
    PgmTokenizer(std::istream& in, std::string path) : in_(in), path_(std::move(path)) {}

    std::string next(const char* what)
    {
        std::string token;
        while (true)
        {
            const int ch = in_.get();
            if (ch == std::istream::traits_type::eof())
            {
                if (!token.empty())
                {
                    return token;
                }
                throw std::runtime_error(path_ + ":" + std::to_string(line_) +
                                         ": unexpected end of file, expected " + std::string(what));
            }
            if (ch == '\n')
            {
                ++line_;
            }
            if (ch == '#' && token.empty())
            {
                std::string comment;
                std::getline(in_, comment);
                ++line_;
                continue;
            }
            if (std::isspace(ch))
            {
                if (!token.empty())
                {
                    return token;
                }
                continue;
            }
            token.push_back(static_cast<char>(ch));
        }
    }

    int next_int(const char* what)
    {
        const std::string token = next(what);
        try
        {
            std::size_t used = 0;
            const int value = std::stoi(token, &used);
            if (used != token.size())
            {
                throw std::invalid_argument(token);
            }
            return value;
        } catch (const std::exception&)
        {
            throw std::runtime_error(path_ + ":" + std::to_string(line_) + ": expected " +
                                     std::string(what) + ", got '" + token + "'");
        }
    }

    int line() const { return line_; }
    const std::string& path() const { return path_; }

private:
    std::istream& in_;
    std::string path_;
    int line_ = 1;
};

} // namespace detail

/**
 * Reads a plain-text (P2) PGM image. Comments and arbitrary whitespace are
 * accepted per the Netpbm grammar; the binary P5 variant is rejected.
 */
inline PgmImage load_pgm(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw std::runtime_error(path + ": cannot open file for reading");
    }
    detail::PgmTokenizer tok(in, path);
    const std::string magic = tok.next("magic number");
    if (magic != "P2")
    {
        throw std::runtime_error(path + ": expected plain PGM magic 'P2', got '" + magic + "'");
    }
    PgmImage image;
    image.cols = tok.next_int("width");
    image.rows = tok.next_int("height");
    image.maxval = tok.next_int("maxval");
    if (image.cols <= 0 || image.rows <= 0)
    {
        throw std::runtime_error(path + ": non-positive image dimensions");
    }
    if (image.maxval <= 0 || image.maxval > 65535)
    {
        throw std::runtime_error(path + ": maxval out of range: " + std::to_string(image.maxval));
    }
    const std::size_t count = static_cast<std::size_t>(image.rows) * image.cols;
    image.pixels.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
    {
        const int value = tok.next_int("pixel value");
        if (value < 0 || value > image.maxval)
        {
            throw std::runtime_error(path + ":" + std::to_string(tok.line()) + ": pixel value " +
                                     std::to_string(value) + " outside [0, maxval]");
        }
        image.pixels.push_back(value);
    }
    return image;
}

/// Writes a plain-text (P2) PGM image, one image row per line.
inline void save_pgm(const PgmImage& image, const std::string& path)
{
    if (image.rows <= 0 || image.cols <= 0 ||
        image.pixels.size() != static_cast<std::size_t>(image.rows) * image.cols)
    {
        throw std::invalid_argument("save_pgm: inconsistent image dimensions");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        throw std::runtime_error(path + ": cannot open file for writing");
    }
    out << "P2\n" << image.cols << " " << image.rows << "\n" << image.maxval << "\n";
    for (int r = 0; r < image.rows; ++r)
    {
        for (int c = 0; c < image.cols; ++c)
        {
            out << image.at(r, c) << (c + 1 == image.cols ? '\n' : ' ');
        }
    }
    if (!out)
    {
        throw std::runtime_error(path + ": write failed");
    }
}

} // namespace io
} // namespace morphfuse

#endif /* MORPHFUSE_IO_PGM_HPP */
