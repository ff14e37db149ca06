// SPDX-License-Identifier: Apache-2.0
//
// nfsec - near-field secure hybrid precoding simulator
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "nfsec/csv.hpp"
#include "nfsec/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nfsec
{
    void CsvArtifact::add(std::vector<CsvValue> row)
    {
        if (row.size() != columns.size())
            throw DomainError("row of " + std::to_string(row.size()) + " values for " + std::to_string(columns.size()) +
                              " columns in '" + name + "'");
        rows.push_back(std::move(row));
    }

    std::string format_value(const CsvValue &v)
    {
        if (const double *d = std::get_if<double>(&v))
        {
            if (std::isnan(*d))
                return "nan";
            if (std::isinf(*d))
                return *d > 0 ? "inf" : "-inf";
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", *d);
            return buf;
        }
        if (const std::int64_t *i = std::get_if<std::int64_t>(&v))
            return std::to_string(*i);
        const std::string &s = std::get<std::string>(v);
        if (s.find_first_of(",\"\n") == std::string::npos)
            return s;
        std::string q = "\"";
        for (char c : s)
        {
            if (c == '"')
                q += '"';
            q += c;
        }
        return q + "\"";
    }

    std::string fnv1a_hex(const std::string &text)
    {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : text)
        {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }

    namespace
    {
        void write_text(const std::filesystem::path &path, const std::string &text)
        {
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            if (!out)
                throw IoError("cannot open '" + path.string() + "' for writing");
            out << text;
            out.close();
            if (!out)
                throw IoError("write to '" + path.string() + "' failed");
        }
    }

    void write_csv(const CsvArtifact &artifact, const std::filesystem::path &path)
    {
        std::string text;
        for (std::size_t c = 0; c < artifact.columns.size(); ++c)
            text += (c ? "," : "") + artifact.columns[c];
        text += '\n';
        for (const auto &row : artifact.rows)
        {
            for (std::size_t c = 0; c < row.size(); ++c)
            {
                if (c)
                    text += ',';
                text += format_value(row[c]);
            }
            text += '\n';
        }
        write_text(path, text);
    }

    void write_meta(const CsvArtifact &artifact, const ArtifactMeta &meta, const std::filesystem::path &path)
    {
        nlohmann::ordered_json j;
        j["artifact"] = artifact.name;
        j["artifact_version"] = artifact_version;
        j["config_hash"] = meta.config_hash;
        j["seed"] = meta.seed;
        j["kind"] = meta.kind;
        j["columns"] = artifact.columns;
        j["rows"] = artifact.rows.size();
        write_text(path, j.dump(2) + "\n");
    }

    std::size_t CsvTable::column(const std::string &name) const
    {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name)
                return i;
        throw DomainError("no column '" + name + "'");
    }

    double CsvTable::number(std::size_t row, const std::string &name) const
    {
        return std::stod(rows.at(row).at(column(name)));
    }

    CsvTable read_csv(const std::filesystem::path &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw IoError("cannot read '" + path.string() + "'");
        auto split = [](const std::string &line)
        {
            std::vector<std::string> out;
            std::string cur;
            bool quoted = false;
            for (std::size_t i = 0; i < line.size(); ++i)
            {
                const char c = line[i];
                if (quoted)
                {
                    if (c == '"' && i + 1 < line.size() && line[i + 1] == '"')
                        cur += line[++i];
                    else if (c == '"')
                        quoted = false;
                    else
                        cur += c;
                }
                else if (c == '"')
                    quoted = true;
                else if (c == ',')
                    out.push_back(std::exchange(cur, {}));
                else
                    cur += c;
            }
            out.push_back(cur);
            return out;
        };
        CsvTable t;
        std::string line;
        if (std::getline(in, line))
            t.columns = split(line);
        while (std::getline(in, line))
            t.rows.push_back(split(line));
        return t;
    }
}
