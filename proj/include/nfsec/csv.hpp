// SPDX-License-Identifier: Apache-2.0
//
// nfsec - near-field secure hybrid precoding simulator
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#ifndef NFSEC_CSV_HPP
#define NFSEC_CSV_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace nfsec
{
    using CsvValue = std::variant<double, std::int64_t, std::string>;

    struct CsvArtifact
    {
        std::string name; // file stem
        std::vector<std::string> columns;
        std::vector<std::vector<CsvValue>> rows;

        void add(std::vector<CsvValue> row);
    };

    struct ArtifactMeta
    {
        std::string config_hash;
        std::uint64_t seed = 0;
        std::string kind;
    };

    inline constexpr int artifact_version = 1;

    std::string format_value(const CsvValue &v);
    std::string fnv1a_hex(const std::string &text);

    void write_csv(const CsvArtifact &artifact, const std::filesystem::path &path);
    void write_meta(const CsvArtifact &artifact, const ArtifactMeta &meta, const std::filesystem::path &path);

    struct CsvTable
    {
        std::vector<std::string> columns;
        std::vector<std::vector<std::string>> rows;

        std::size_t column(const std::string &name) const;
        double number(std::size_t row, const std::string &name) const;
    };

    CsvTable read_csv(const std::filesystem::path &path);
}

#endif
