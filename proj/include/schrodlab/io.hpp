#pragma once

#include "schrodlab/symbol.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace schrodlab {

using json = nlohmann::json;

struct LoadedSymbol {
    PolySymbol symbol;
    std::string name;
    bool negated = false; // file held a negative definite P; stored as -P
};

// JSON or TOML by extension: {name, n, m, terms: [{alpha: [...], c: ...}]}
LoadedSymbol load_symbol(const std::string& path);
LoadedSymbol symbol_from_json(const json& j);
json symbol_to_json(const PolySymbol& P, const std::string& name = {});
void save_symbol(const PolySymbol& P, const std::string& path, const std::string& name = {});

// Parses JSON or TOML (by extension) into a JSON value.
json load_document(const std::string& path);
json parse_toml(const std::string& text);

// Numbers may be given as "inf" strings in JSON.
double as_number(const json& j);
std::vector<double> as_numbers(const json& j);

// Write to path via a temporary file in the same directory and rename.
void write_atomic(const std::string& path, const std::string& content);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
    std::string str() const;
};

std::string fmt(double x); // shortest round-trip form, "inf" for infinities

} // namespace schrodlab
