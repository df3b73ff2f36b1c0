#include "schrodlab/io.hpp"

#include "schrodlab/error.hpp"

#include <toml.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace schrodlab {

namespace fs = std::filesystem;

namespace {

std::string extension(const std::string& path) {
    std::string e = fs::path(path).extension().string();
    for (auto& c : e) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return e;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

json toml_to_json(const toml::node& node) {
    if (auto t = node.as_table()) {
        json j = json::object();
        for (const auto& [k, v] : *t) j[std::string(k.str())] = toml_to_json(v);
        return j;
    }
    if (auto a = node.as_array()) {
        json j = json::array();
        for (const auto& v : *a) j.push_back(toml_to_json(v));
        return j;
    }
    if (auto v = node.as_integer()) return v->get();
    if (auto v = node.as_floating_point()) {
        double x = v->get();
        if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
        return x;
    }
    if (auto v = node.as_boolean()) return v->get();
    if (auto v = node.as_string()) return v->get();
    throw ConfigError("unsupported TOML value (dates and times are not accepted)");
}

} // namespace

std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

double as_number(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        if (s == "inf" || s == "+inf" || s == "infinity") return INFINITY;
        if (s == "-inf") return -INFINITY;
    }
    throw ConfigError("expected a number, got " + j.dump());
}

std::vector<double> as_numbers(const json& j) {
    if (!j.is_array()) throw ConfigError("expected a list of numbers, got " + j.dump());
    std::vector<double> v;
    for (const auto& x : j) v.push_back(as_number(x));
    return v;
}

json parse_toml(const std::string& text) {
    try {
        toml::table t = toml::parse(text);
        return toml_to_json(t);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << "TOML parse error: " << e.description() << " at line " << e.source().begin.line;
        throw ConfigError(os.str());
    }
}

json load_document(const std::string& path) {
    if (!fs::exists(path)) throw ConfigError("file not found: " + path);
    std::string text = read_file(path);
    std::string ext = extension(path);
    if (ext == ".toml") return parse_toml(text);
    if (ext == ".json") {
        try {
            return json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("JSON parse error in ") + path + ": " + e.what());
        }
    }
    throw ConfigError("unknown config extension '" + ext + "' (expected .json or .toml)");
}

LoadedSymbol symbol_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("symbol must be an object");
    for (const char* key : {"n", "m", "terms"})
        if (!j.contains(key)) throw ConfigError(std::string("symbol is missing '") + key + "'");
    if (!j["n"].is_number_integer() || !j["m"].is_number_integer())
        throw ConfigError("symbol fields n and m must be integers");
    int n = j["n"].get<int>(), m = j["m"].get<int>();
    if (!j["terms"].is_array() || j["terms"].empty()) throw ConfigError("symbol terms must be a non-empty list");
    std::vector<Term> terms;
    for (const auto& t : j["terms"]) {
        if (!t.is_object() || !t.contains("alpha") || !t.contains("c"))
            throw ConfigError("each term needs 'alpha' and 'c'");
        Term term;
        for (const auto& a : t["alpha"]) {
            if (!a.is_number_integer() || a.get<int>() < 0)
                throw ConfigError("multi-index entries must be non-negative integers");
            term.alpha.push_back(a.get<int>());
        }
        term.c = as_number(t["c"]);
        terms.push_back(std::move(term));
    }
    LoadedSymbol out{PolySymbol(n, m, std::move(terms)), j.value("name", std::string()), false};
    out.symbol = normalize_sign(out.symbol, &out.negated);
    return out;
}

LoadedSymbol load_symbol(const std::string& path) {
    json j = load_document(path);
    LoadedSymbol s = symbol_from_json(j);
    if (s.name.empty()) s.name = fs::path(path).stem().string();
    return s;
}

json symbol_to_json(const PolySymbol& P, const std::string& name) {
    json j;
    if (!name.empty()) j["name"] = name;
    j["n"] = P.n();
    j["m"] = P.m();
    j["terms"] = json::array();
    for (const auto& t : P.terms()) j["terms"].push_back({{"alpha", t.alpha}, {"c", t.c}});
    return j;
}

void save_symbol(const PolySymbol& P, const std::string& path, const std::string& name) {
    std::string ext = extension(path);
    if (ext == ".json") {
        write_atomic(path, symbol_to_json(P, name).dump(2) + "\n");
        return;
    }
    if (ext != ".toml") throw ConfigError("unknown symbol extension '" + ext + "'");
    std::ostringstream os;
    if (!name.empty()) os << "name = " << json(name).dump() << "\n";
    os << "n = " << P.n() << "\nm = " << P.m() << "\n\n";
    for (const auto& t : P.terms()) {
        os << "[[terms]]\nalpha = [";
        for (size_t i = 0; i < t.alpha.size(); ++i) os << (i ? ", " : "") << t.alpha[i];
        std::string c = fmt(t.c);
        if (c.find_first_of(".eEn") == std::string::npos) c += ".0";
        os << "]\nc = " << c << "\n\n";
    }
    write_atomic(path, os.str());
}

void write_atomic(const std::string& path, const std::string& content) {
    fs::path target(path);
    fs::path dir = target.has_parent_path() ? target.parent_path() : fs::path(".");
    std::string tmpl = (dir / ("." + target.filename().string() + ".XXXXXX")).string();
    std::vector<char> name(tmpl.begin(), tmpl.end());
    name.push_back('\0');
    int fd = ::mkstemp(name.data());
    if (fd < 0) throw Error("cannot create temporary file in " + dir.string());
    std::string tmp(name.data());
    size_t off = 0;
    while (off < content.size()) {
        ssize_t w = ::write(fd, content.data() + off, content.size() - off);
        if (w <= 0) {
            ::close(fd);
            fs::remove(tmp);
            throw Error("write failed for " + path);
        }
        off += static_cast<size_t>(w);
    }
    ::fsync(fd);
    ::close(fd);
    std::error_code ec;
    fs::permissions(tmp, fs::perms::owner_read | fs::perms::owner_write | fs::perms::group_read |
                             fs::perms::others_read, ec);
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error("rename to " + path + " failed: " + ec.message());
    }
}

std::string CsvTable::str() const {
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            const auto& c = cells[i];
            bool quote = c.find_first_of(",\"\n") != std::string::npos;
            if (i) os << ',';
            if (quote) {
                os << '"';
                for (char ch : c) os << (ch == '"' ? "\"\"" : std::string(1, ch));
                os << '"';
            } else {
                os << c;
            }
        }
        os << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return os.str();
}

} // namespace schrodlab
