#include "povmkit/io.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace povmkit {

namespace {

[[noreturn]] void parse_fail(const std::string& where, const std::string& what) {
    throw ParseError(where + ": " + what);
}

// A numeric slot: JSON number, or an exact rational "p/q" with integer
// numerator and nonzero integer denominator.
double parse_real(const Json& value, const std::string& where) {
    if (value.is_number()) {
        return value.get<double>();
    }
    if (!value.is_string()) {
        parse_fail(where, "expected a number or a rational string \"p/q\", got " +
                              std::string(value.type_name()));
    }
    const std::string text = value.get<std::string>();
    const std::size_t slash = text.find('/');
    if (slash == std::string::npos || slash == 0 || slash + 1 == text.size()) {
        parse_fail(where, "malformed rational \"" + text + "\", expected \"p/q\"");
    }
    long long p = 0;
    long long q = 0;
    const char* num_begin = text.data();
    const char* num_end = text.data() + slash;
    const char* den_begin = text.data() + slash + 1;
    const char* den_end = text.data() + text.size();
    // std::from_chars rejects a leading '+'; accept it here since published
    // tables sometimes carry explicit signs.
    if (num_begin < num_end && *num_begin == '+') {
        ++num_begin;
    }
    if (den_begin < den_end && *den_begin == '+') {
        ++den_begin;
    }
    auto rn = std::from_chars(num_begin, num_end, p);
    auto rd = std::from_chars(den_begin, den_end, q);
    if (rn.ec != std::errc() || rn.ptr != num_end ||
        rd.ec != std::errc() || rd.ptr != den_end) {
        parse_fail(where, "malformed rational \"" + text + "\", expected \"p/q\"");
    }
    if (q == 0) {
        parse_fail(where, "rational \"" + text + "\" has a zero denominator");
    }
    return static_cast<double>(p) / static_cast<double>(q);
}

Complex parse_entry(const Json& value, const std::string& where) {
    if (!value.is_array() || value.size() != 2) {
        parse_fail(where, "expected a two-element [re, im] array");
    }
    const double re = parse_real(value[0], where + "[0]");
    const double im = parse_real(value[1], where + "[1]");
    return Complex(re, im);
}

Matrix parse_matrix(const Json& value, int dim, const std::string& where) {
    if (!value.is_array()) {
        parse_fail(where, "expected a flat row-major entry array");
    }
    const std::size_t expected = static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim);
    if (value.size() != expected) {
        parse_fail(where, "matrix has " + std::to_string(value.size()) +
                              " entries, expected " + std::to_string(expected) +
                              " for dim " + std::to_string(dim));
    }
    Matrix m(dim, dim);
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
            const std::size_t k = static_cast<std::size_t>(r) * dim + c;
            m(r, c) = parse_entry(value[k], where + "[" + std::to_string(k) + "]");
        }
    }
    return m;
}

Json document_from_text(const std::string& text) {
    Json doc = Json::parse(text, nullptr, false);
    if (doc.is_discarded()) {
        throw ParseError("document is not valid JSON");
    }
    return doc;
}

int parse_dim(const Json& doc) {
    if (!doc.is_object() || !doc.contains("dim")) {
        parse_fail("$", "expected an object with a \"dim\" field");
    }
    if (!doc["dim"].is_number_integer() || doc["dim"].get<int>() < 1) {
        parse_fail("dim", "expected a positive integer");
    }
    return doc["dim"].get<int>();
}

Json entry_to_json(const Complex& z) {
    return Json::array({z.real(), z.imag()});
}

} // namespace

OperatorFile parse_operator_file(const std::string& text) {
    const Json doc = document_from_text(text);
    OperatorFile file;
    file.dim = parse_dim(doc);
    if (!doc.contains("operators") || !doc["operators"].is_array() ||
        doc["operators"].empty()) {
        parse_fail("operators", "expected a non-empty array");
    }
    for (std::size_t k = 0; k < doc["operators"].size(); ++k) {
        const Json& item = doc["operators"][k];
        const std::string where = "operators[" + std::to_string(k) + "]";
        if (!item.is_object() || !item.contains("matrix")) {
            parse_fail(where, "expected an object with a \"matrix\" field");
        }
        NamedOperator op;
        op.name = item.contains("name") && item["name"].is_string()
                      ? item["name"].get<std::string>()
                      : "op" + std::to_string(k);
        op.matrix = parse_matrix(item["matrix"], file.dim, where + ".matrix");
        file.operators.push_back(std::move(op));
    }
    return file;
}

OperatorFile load_operator_file(const std::string& path) {
    try {
        return parse_operator_file(read_text_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::string serialize_operator_file(const OperatorFile& file) {
    Json doc;
    doc["dim"] = file.dim;
    doc["operators"] = Json::array();
    for (const NamedOperator& op : file.operators) {
        Json item;
        item["name"] = op.name;
        Json entries = Json::array();
        for (int r = 0; r < file.dim; ++r) {
            for (int c = 0; c < file.dim; ++c) {
                entries.push_back(entry_to_json(op.matrix(r, c)));
            }
        }
        item["matrix"] = std::move(entries);
        doc["operators"].push_back(std::move(item));
    }
    return doc.dump(2) + "\n";
}

Ensemble parse_ensemble_file(const std::string& text) {
    const Json doc = document_from_text(text);
    const int dim = parse_dim(doc);
    if (!doc.contains("states") || !doc["states"].is_array() || doc["states"].empty()) {
        parse_fail("states", "expected a non-empty array");
    }
    std::vector<Ensemble::Member> members;
    for (std::size_t k = 0; k < doc["states"].size(); ++k) {
        const Json& item = doc["states"][k];
        const std::string where = "states[" + std::to_string(k) + "]";
        if (!item.is_object() || !item.contains("matrix") || !item.contains("weight")) {
            parse_fail(where, "expected an object with \"weight\" and \"matrix\" fields");
        }
        Ensemble::Member member;
        member.weight = parse_real(item["weight"], where + ".weight");
        member.state = parse_matrix(item["matrix"], dim, where + ".matrix");
        members.push_back(std::move(member));
    }
    return Ensemble::from_members(std::move(members));
}

Ensemble load_ensemble_file(const std::string& path) {
    try {
        return parse_ensemble_file(read_text_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open " + path + " for reading");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw ParseError("error while reading " + path);
    }
    return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw ParseError("cannot open " + tmp.string() + " for writing");
        }
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw ParseError("error while writing " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw ParseError("cannot move " + tmp.string() + " into place: " + ec.message());
    }
}

Json matrix_to_json(const Matrix& m) {
    Json entries = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            entries.push_back(entry_to_json(m(r, c)));
        }
    }
    return entries;
}

Json complex_to_json(const Complex& z) {
    return entry_to_json(z);
}

} // namespace povmkit
