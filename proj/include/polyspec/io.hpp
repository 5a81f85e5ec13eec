#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>

#include <json.hpp>

#include "polyspec/geometry.hpp"

namespace polyspec {

using PolytopeFile = std::variant<VPolytope, HPolytope>;

// {"kind": "V"|"H", "dim": d, "points": [[..]] | "A": [[..]], "b": [..],
//  "labels": optional}
inline PolytopeFile parse_polytope(const nlohmann::json& j, const std::string& source) {
    auto fail = [&](const std::string& what) -> void {
        throw InvalidInput(source + ": " + what);
    };
    if (!j.is_object()) fail("top level must be an object");
    if (!j.contains("kind") || !j["kind"].is_string()) fail("missing string field 'kind'");
    if (!j.contains("dim") || !j["dim"].is_number_integer()) fail("missing integer field 'dim'");
    const std::string kind = j["kind"].get<std::string>();
    const int dim = j["dim"].get<int>();
    if (dim < 1) fail("'dim' must be positive");

    static const char* known[] = {"kind", "dim", "points", "A", "b", "labels"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) fail("unknown field '" + it.key() + "'");
    }

    auto read_matrix = [&](const nlohmann::json& arr, const char* name) {
        std::vector<Vec> rows;
        if (!arr.is_array() || arr.empty()) fail(std::string("field '") + name + "' must be a non-empty array of rows");
        for (const auto& row : arr) {
            if (!row.is_array() || int(row.size()) != dim)
                fail(std::string("field '") + name + "': every row must have 'dim' numbers");
            Vec r;
            for (const auto& v : row) {
                if (!v.is_number()) fail(std::string("field '") + name + "': non-numeric entry");
                r.push_back(v.get<double>());
            }
            rows.push_back(std::move(r));
        }
        return rows;
    };

    if (kind == "V") {
        if (!j.contains("points")) fail("kind 'V' requires field 'points'");
        VPolytope K;
        K.dim = dim;
        K.points = read_matrix(j["points"], "points");
        return K;
    }
    if (kind == "H") {
        if (!j.contains("A")) fail("kind 'H' requires field 'A'");
        if (!j.contains("b") || !j["b"].is_array()) fail("kind 'H' requires array field 'b'");
        HPolytope P;
        P.dim = dim;
        auto rows = read_matrix(j["A"], "A");
        P.A = Mat(int(rows.size()), dim);
        for (int i = 0; i < int(rows.size()); ++i)
            for (int c = 0; c < dim; ++c) P.A(i, c) = rows[i][c];
        for (const auto& v : j["b"]) {
            if (!v.is_number()) fail("field 'b': non-numeric entry");
            P.b.push_back(v.get<double>());
        }
        if (int(P.b.size()) != P.A.rows) fail("row count of A must equal length of b");
        return P;
    }
    fail("field 'kind' must be \"V\" or \"H\"");
    return VPolytope{};  // unreachable
}

inline PolytopeFile read_polytope(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput(path + ": cannot open file");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidInput(path + ": " + e.what());
    }
    return parse_polytope(j, path);
}

inline nlohmann::json to_json(const VPolytope& K) {
    nlohmann::json j;
    j["kind"] = "V";
    j["dim"] = K.dim;
    j["points"] = K.points;
    return j;
}

inline nlohmann::json to_json(const HPolytope& P) {
    nlohmann::json j;
    j["kind"] = "H";
    j["dim"] = P.dim;
    std::vector<Vec> rows;
    for (int i = 0; i < P.A.rows; ++i) rows.push_back(P.A.row(i));
    j["A"] = rows;
    j["b"] = P.b;
    return j;
}

inline void write_polytope(const std::string& path, const PolytopeFile& p) {
    std::ofstream out(path);
    if (!out) throw InvalidInput(path + ": cannot open for writing");
    std::visit([&](const auto& poly) { out << to_json(poly).dump(2) << "\n"; }, p);
}

}  // namespace polyspec
