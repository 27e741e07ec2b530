/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: include/morphfuse/core/mesh_io.hpp
 *
 * Copyright 2026 The morphfuse authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#ifndef MORPHFUSE_CORE_MESH_IO_HPP
#define MORPHFUSE_CORE_MESH_IO_HPP

#include "morphfuse/core/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace morphfuse {
namespace core {

enum class MeshFormat
{
    OBJ,
    PLY
};

/// Picks the format from the file extension (.obj / .ply, case-insensitive).
inline MeshFormat mesh_format_from_path(const std::filesystem::path& path)
{
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".obj")
        return MeshFormat::OBJ;
    if (ext == ".ply")
        return MeshFormat::PLY;
    throw std::invalid_argument("mesh_format_from_path: unknown mesh extension '" + ext +
                                "' in " + path.string());
}

namespace detail {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_ws(std::string_view s)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size())
    {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r'))
            ++i;
        std::size_t start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r')
            ++i;
        if (i > start)
            out.push_back(s.substr(start, i - start));
    }
    return out;
}

[[noreturn]] inline void parse_fail(const std::filesystem::path& path, std::size_t line,
                                    const std::string& what)
{
    throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": " + what);
}

inline double parse_double(std::string_view tok, const std::filesystem::path& path,
                           std::size_t line)
{
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        parse_fail(path, line, "expected a number, got '" + std::string(tok) + "'");
    return value;
}

inline long parse_int(std::string_view tok, const std::filesystem::path& path, std::size_t line)
{
    long value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        parse_fail(path, line, "expected an integer, got '" + std::string(tok) + "'");
    return value;
}

/// Shortest text form that round-trips a double exactly.
inline void append_number(std::string& out, double v)
{
    char buf[32];
    int n = std::snprintf(buf, sizeof(buf), "%.17g", v);
    // prefer the shorter representation when it survives a round trip
    char shortbuf[32];
    int ns = std::snprintf(shortbuf, sizeof(shortbuf), "%.15g", v);
    double back = 0.0;
    std::from_chars(shortbuf, shortbuf + ns, back);
    if (back == v)
        out.append(shortbuf, ns);
    else
        out.append(buf, n);
}

inline Mesh load_obj(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("load_mesh: cannot open " + path.string());

    Mesh mesh;
    std::vector<Vec3> file_normals;
    std::string line;
    std::size_t lineno = 0;
    std::size_t face_record = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        std::string_view sv = trim(line);
        if (sv.empty() || sv.front() == '#')
            continue;
        auto tok = split_ws(sv);
        std::string_view tag = tok[0];
        if (tag == "v")
        {
            if (tok.size() < 4)
                parse_fail(path, lineno, "vertex record needs 3 coordinates");
            mesh.vertices.emplace_back(parse_double(tok[1], path, lineno),
                                       parse_double(tok[2], path, lineno),
                                       parse_double(tok[3], path, lineno));
        }
        else if (tag == "vn")
        {
            if (tok.size() < 4)
                parse_fail(path, lineno, "normal record needs 3 coordinates");
            file_normals.emplace_back(parse_double(tok[1], path, lineno),
                                      parse_double(tok[2], path, lineno),
                                      parse_double(tok[3], path, lineno));
        }
        else if (tag == "f")
        {
            if (tok.size() != 4)
                parse_fail(path, lineno, "only triangular faces are supported (got " +
                                             std::to_string(tok.size() - 1) + " corners)");
            ++face_record;
            std::array<int, 3> face{};
            for (int c = 0; c < 3; ++c)
            {
                // accept i, i/t, i//n, i/t/n; only the vertex index is used
                std::string_view ref = tok[c + 1];
                std::size_t slash = ref.find('/');
                std::string_view idx_tok = slash == std::string_view::npos ? ref : ref.substr(0, slash);
                long idx = parse_int(idx_tok, path, lineno);
                if (idx < 0)
                    idx = static_cast<long>(mesh.vertices.size()) + idx + 1; // OBJ relative indexing
                if (idx < 1 || idx > static_cast<long>(mesh.vertices.size()))
                    throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                             ": face " + std::to_string(face_record) +
                                             " references vertex " + std::to_string(idx) +
                                             " but only " + std::to_string(mesh.vertices.size()) +
                                             " vertices are defined");
                face[c] = static_cast<int>(idx - 1);
            }
            mesh.faces.push_back(face);
        }
        // other records (vt, usemtl, o, g, s, mtllib, ...) are ignored
    }
    if (file_normals.size() == mesh.vertices.size() && !file_normals.empty())
        mesh.normals = std::move(file_normals);
    validate(mesh);
    return mesh;
}

inline Mesh load_ply(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("load_mesh: cannot open " + path.string());

    std::string line;
    std::size_t lineno = 0;
    auto next_line = [&]() -> std::string_view {
        if (!std::getline(in, line))
            parse_fail(path, lineno, "unexpected end of file");
        ++lineno;
        return trim(line);
    };

    if (next_line() != "ply")
        parse_fail(path, lineno, "not a PLY file (missing 'ply' magic)");

    struct Property
    {
        std::string name;
        bool is_list = false;
    };
    struct Element
    {
        std::string name;
        std::size_t count = 0;
        std::vector<Property> props;
    };
    std::vector<Element> elements;
    bool format_seen = false;

    for (;;)
    {
        std::string_view sv = next_line();
        if (sv.empty() || sv.substr(0, 7) == "comment")
            continue;
        auto tok = split_ws(sv);
        if (tok[0] == "format")
        {
            if (tok.size() < 2 || tok[1] != "ascii")
                parse_fail(path, lineno,
                           "only ASCII PLY is supported (binary PLY is rejected)");
            format_seen = true;
        }
        else if (tok[0] == "element")
        {
            if (tok.size() != 3)
                parse_fail(path, lineno, "malformed element declaration");
            Element el;
            el.name = std::string(tok[1]);
            el.count = static_cast<std::size_t>(parse_int(tok[2], path, lineno));
            elements.push_back(el);
        }
        else if (tok[0] == "property")
        {
            if (elements.empty())
                parse_fail(path, lineno, "property before any element");
            Property p;
            if (tok.size() >= 2 && tok[1] == "list")
            {
                if (tok.size() != 5)
                    parse_fail(path, lineno, "malformed list property");
                p.is_list = true;
                p.name = std::string(tok[4]);
            }
            else
            {
                if (tok.size() != 3)
                    parse_fail(path, lineno, "malformed property");
                p.name = std::string(tok[2]);
            }
            elements.back().props.push_back(p);
        }
        else if (tok[0] == "end_header")
        {
            break;
        }
        else
        {
            parse_fail(path, lineno, "unknown header record '" + std::string(tok[0]) + "'");
        }
    }
    if (!format_seen)
        parse_fail(path, lineno, "missing format declaration");

    Mesh mesh;
    std::size_t face_record = 0;
    for (const Element& el : elements)
    {
        if (el.name == "vertex")
        {
            int ix = -1, iy = -1, iz = -1, ir = -1, ig = -1, ib = -1;
            for (std::size_t p = 0; p < el.props.size(); ++p)
            {
                const std::string& n = el.props[p].name;
                if (n == "x") ix = static_cast<int>(p);
                else if (n == "y") iy = static_cast<int>(p);
                else if (n == "z") iz = static_cast<int>(p);
                else if (n == "red") ir = static_cast<int>(p);
                else if (n == "green") ig = static_cast<int>(p);
                else if (n == "blue") ib = static_cast<int>(p);
            }
            if (ix < 0 || iy < 0 || iz < 0)
                parse_fail(path, lineno, "vertex element lacks x/y/z properties");
            const bool with_color = ir >= 0 && ig >= 0 && ib >= 0;
            mesh.vertices.reserve(el.count);
            if (with_color)
                mesh.colors.reserve(el.count);
            for (std::size_t i = 0; i < el.count; ++i)
            {
                auto tok = split_ws(next_line());
                if (tok.size() != el.props.size())
                    parse_fail(path, lineno, "vertex row has " + std::to_string(tok.size()) +
                                                 " values, expected " +
                                                 std::to_string(el.props.size()));
                mesh.vertices.emplace_back(parse_double(tok[ix], path, lineno),
                                           parse_double(tok[iy], path, lineno),
                                           parse_double(tok[iz], path, lineno));
                if (with_color)
                {
                    mesh.colors.emplace_back(parse_int(tok[ir], path, lineno) / 255.0,
                                             parse_int(tok[ig], path, lineno) / 255.0,
                                             parse_int(tok[ib], path, lineno) / 255.0);
                }
            }
        }
        else if (el.name == "face")
        {
            mesh.faces.reserve(el.count);
            for (std::size_t i = 0; i < el.count; ++i)
            {
                auto tok = split_ws(next_line());
                ++face_record;
                if (tok.empty())
                    parse_fail(path, lineno, "empty face row");
                long n = parse_int(tok[0], path, lineno);
                if (n != 3)
                    parse_fail(path, lineno, "only triangular faces are supported (face " +
                                                 std::to_string(face_record) + " has " +
                                                 std::to_string(n) + " corners)");
                if (tok.size() != 4)
                    parse_fail(path, lineno, "face row has wrong token count");
                std::array<int, 3> face{};
                for (int c = 0; c < 3; ++c)
                {
                    long idx = parse_int(tok[c + 1], path, lineno);
                    if (idx < 0 || idx >= static_cast<long>(mesh.vertices.size()))
                        throw std::runtime_error(
                            path.string() + ":" + std::to_string(lineno) + ": face " +
                            std::to_string(face_record) + " references vertex " +
                            std::to_string(idx) + " but the mesh has " +
                            std::to_string(mesh.vertices.size()) + " vertices");
                    face[c] = static_cast<int>(idx);
                }
                mesh.faces.push_back(face);
            }
        }
        else
        {
            // skip rows of unknown elements
            for (std::size_t i = 0; i < el.count; ++i)
                next_line();
        }
    }
    validate(mesh);
    return mesh;
}

inline void save_obj(const Mesh& mesh, const std::filesystem::path& path)
{
    std::string out;
    out.reserve(mesh.vertices.size() * 40 + mesh.faces.size() * 24);
    for (const Vec3& v : mesh.vertices)
    {
        out += "v ";
        append_number(out, v.x());
        out += ' ';
        append_number(out, v.y());
        out += ' ';
        append_number(out, v.z());
        out += '\n';
    }
    const bool with_normals = mesh.has_normals();
    if (with_normals)
    {
        for (const Vec3& n : mesh.normals)
        {
            out += "vn ";
            append_number(out, n.x());
            out += ' ';
            append_number(out, n.y());
            out += ' ';
            append_number(out, n.z());
            out += '\n';
        }
    }
    for (const auto& f : mesh.faces)
    {
        out += 'f';
        for (int c = 0; c < 3; ++c)
        {
            out += ' ';
            out += std::to_string(f[c] + 1);
            if (with_normals)
            {
                out += "//";
                out += std::to_string(f[c] + 1);
            }
        }
        out += '\n';
    }
    std::ofstream file(path, std::ios::binary);
    if (!file || !(file << out))
        throw std::runtime_error("save_mesh: cannot write " + path.string());
}

inline void save_ply(const Mesh& mesh, const std::filesystem::path& path)
{
    const bool with_color = mesh.has_colors();
    std::string out;
    out += "ply\nformat ascii 1.0\n";
    out += "element vertex " + std::to_string(mesh.vertices.size()) + "\n";
    out += "property double x\nproperty double y\nproperty double z\n";
    if (with_color)
        out += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    out += "element face " + std::to_string(mesh.faces.size()) + "\n";
    out += "property list uchar int vertex_indices\n";
    out += "end_header\n";
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
    {
        const Vec3& v = mesh.vertices[i];
        append_number(out, v.x());
        out += ' ';
        append_number(out, v.y());
        out += ' ';
        append_number(out, v.z());
        if (with_color)
        {
            const Vec3& c = mesh.colors[i];
            for (int k = 0; k < 3; ++k)
            {
                double ch = std::clamp(c[k], 0.0, 1.0);
                out += ' ';
                out += std::to_string(static_cast<int>(std::lround(ch * 255.0)));
            }
        }
        out += '\n';
    }
    for (const auto& f : mesh.faces)
    {
        out += '3';
        for (int c = 0; c < 3; ++c)
        {
            out += ' ';
            out += std::to_string(f[c]);
        }
        out += '\n';
    }
    std::ofstream file(path, std::ios::binary);
    if (!file || !(file << out))
        throw std::runtime_error("save_mesh: cannot write " + path.string());
}

} // namespace detail

/**
 * Loads a triangle mesh from an OBJ or ASCII PLY file.
 *
 * Throws std::runtime_error with file:line context on parse errors and on
 * face indices that are out of range (naming the offending face). The
 * returned mesh satisfies all Mesh invariants; vertex and face order are
 * preserved from the file.
 */
inline Mesh load_mesh(const std::filesystem::path& path, MeshFormat format)
{
    return format == MeshFormat::OBJ ? detail::load_obj(path) : detail::load_ply(path);
}

inline Mesh load_mesh(const std::filesystem::path& path)
{
    return load_mesh(path, mesh_format_from_path(path));
}

/**
 * Saves a mesh as OBJ or ASCII PLY. save followed by load restores
 * vertices within 1e-9 (in practice bit-exactly) and faces exactly.
 * Per-vertex colors are carried by PLY only, quantized to 8-bit; OBJ
 * carries positions and normals.
 */
inline void save_mesh(const Mesh& mesh, const std::filesystem::path& path, MeshFormat format)
{
    validate(mesh);
    if (format == MeshFormat::OBJ)
        detail::save_obj(mesh, path);
    else
        detail::save_ply(mesh, path);
}

inline void save_mesh(const Mesh& mesh, const std::filesystem::path& path)
{
    save_mesh(mesh, path, mesh_format_from_path(path));
}

} // namespace core
} // namespace morphfuse

#endif /* MORPHFUSE_CORE_MESH_IO_HPP */
