/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: include/morphfuse/metrics/report.hpp
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

#ifndef MORPHFUSE_METRICS_REPORT_HPP
#define MORPHFUSE_METRICS_REPORT_HPP

#include "morphfuse/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace morphfuse {
namespace metrics {

/**
 * One evaluated metric: its mean over the samples, the per-sample values
 * (in evaluation order), and how the inputs were aligned. All values are
 * nonnegative; the value field is always the mean of the per-sample list.
 */
struct MetricReport
{
    std::string metric;
    double value = 0.0;
    std::string units = "model units";
    std::string alignment = "none"; // none | procrustes | icp
    std::optional<CropSpec> crop;
    std::vector<std::pair<std::string, double>> per_sample;
};

/// Builds a report, deriving the value as the mean of the per-sample values.
inline MetricReport make_report(std::string metric, std::vector<std::pair<std::string, double>> per_sample,
                                std::string units = "model units", std::string alignment = "none",
                                std::optional<CropSpec> crop = std::nullopt)
{
    if (per_sample.empty())
    {
        throw std::invalid_argument("make_report: no samples for metric " + metric);
    }
    MetricReport report;
    report.metric = std::move(metric);
    report.units = std::move(units);
    report.alignment = std::move(alignment);
    report.crop = crop;
    report.per_sample = std::move(per_sample);
    double total = 0.0;
    for (const auto& [name, value] : report.per_sample)
    {
        total += value;
    }
    report.value = total / static_cast<double>(report.per_sample.size());
    return report;
}

/// Population standard deviation of the per-sample values.
inline double metric_stddev(const MetricReport& report)
{
    if (report.per_sample.empty())
    {
        return 0.0;
    }
    double variance = 0.0;
    for (const auto& [name, value] : report.per_sample)
    {
        const double d = value - report.value;
        variance += d * d;
    }
    return std::sqrt(variance / static_cast<double>(report.per_sample.size()));
}

namespace detail {

inline std::string format_value(double value)
{
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.9g", value);
    return buffer;
}

} // namespace detail

/**
 * Aligned text table: one row per sample plus mean and standard deviation
 * rows, one column per metric. Reports must cover identical sample sets in
 * identical order.
 */
inline std::string format_table(const std::vector<MetricReport>& reports)
{
    if (reports.empty())
    {
        throw std::invalid_argument("format_table: no reports");
    }
    for (const auto& report : reports)
    {
        if (report.per_sample.size() != reports.front().per_sample.size())
        {
            throw std::invalid_argument("format_table: reports cover different sample sets");
        }
    }

    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header;
    header.push_back("sample");
    for (const auto& report : reports)
    {
        header.push_back(report.metric);
    }
    rows.push_back(header);
    for (std::size_t s = 0; s < reports.front().per_sample.size(); ++s)
    {
        std::vector<std::string> row;
        row.push_back(reports.front().per_sample[s].first);
        for (const auto& report : reports)
        {
            row.push_back(detail::format_value(report.per_sample[s].second));
        }
        rows.push_back(row);
    }
    std::vector<std::string> mean_row{ "mean" };
    std::vector<std::string> stddev_row{ "stddev" };
    for (const auto& report : reports)
    {
        mean_row.push_back(detail::format_value(report.value));
        stddev_row.push_back(detail::format_value(metric_stddev(report)));
    }
    rows.push_back(mean_row);
    rows.push_back(stddev_row);

    std::vector<std::size_t> widths(rows.front().size(), 0);
    for (const auto& row : rows)
    {
        for (std::size_t c = 0; c < row.size(); ++c)
        {
            widths[c] = std::max(widths[c], row[c].size());
        }
    }
    std::ostringstream out;
    for (const auto& row : rows)
    {
        for (std::size_t c = 0; c < row.size(); ++c)
        {
            out << row[c] << std::string(widths[c] - row[c].size(), ' ');
            out << (c + 1 < row.size() ? "  " : "");
        }
        out << '\n';
    }
    return out.str();
}

/// CSV export of per-sample values: sample column plus one column per metric.
inline std::string format_csv(const std::vector<MetricReport>& reports)
{
    if (reports.empty())
    {
        throw std::invalid_argument("format_csv: no reports");
    }
    for (const auto& report : reports)
    {
        if (report.per_sample.size() != reports.front().per_sample.size())
        {
            throw std::invalid_argument("format_csv: reports cover different sample sets");
        }
    }
    std::ostringstream out;
    out << "sample";
    for (const auto& report : reports)
    {
        out << ',' << report.metric;
    }
    out << '\n';
    for (std::size_t s = 0; s < reports.front().per_sample.size(); ++s)
    {
        out << reports.front().per_sample[s].first;
        for (const auto& report : reports)
        {
            out << ',' << detail::format_value(report.per_sample[s].second);
        }
        out << '\n';
    }
    out << "mean";
    for (const auto& report : reports)
    {
        out << ',' << detail::format_value(report.value);
    }
    out << '\n';
    return out.str();
}

} // namespace metrics
} // namespace morphfuse

#endif /* MORPHFUSE_METRICS_REPORT_HPP */
