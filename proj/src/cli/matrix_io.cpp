#include "oplens/cli/matrix_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace oplens::cli {

using nlohmann::json;

ComplexMatrix parse_matrix(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("dim") || !doc.contains("data")) {
        throw ParseError("matrix file needs \"dim\" and \"data\"");
    }
    if (!doc["dim"].is_number_integer() || doc["dim"].get<long long>() < 1) {
        throw ParseError("\"dim\" must be a positive integer");
    }
    const auto dim = static_cast<Eigen::Index>(doc["dim"].get<long long>());
    const json& data = doc["data"];
    if (!data.is_array() || static_cast<Eigen::Index>(data.size()) != dim) {
        throw ParseError("\"data\" must hold dim rows");
    }
    ComplexMatrix m(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const json& row = data[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim) {
            throw ParseError("row " + std::to_string(i) + " must hold dim entries");
        }
        for (Eigen::Index j = 0; j < dim; ++j) {
            const json& entry = row[static_cast<std::size_t>(j)];
            if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() || !entry[1].is_number()) {
                throw ParseError("entry (" + std::to_string(i) + ", " + std::to_string(j) + ") must be [re, im]");
            }
            m(i, j) = Complex(entry[0].get<double>(), entry[1].get<double>());
        }
    }
    return m;
}

std::string serialize_matrix(const ComplexMatrix& m) {
    json data = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
        data.push_back(std::move(row));
    }
    json doc = {{"dim", m.rows()}, {"data", std::move(data)}};
    return doc.dump() + "\n";
}

ComplexMatrix read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_matrix(buffer.str());
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path);
    out << text;
}

}  // namespace oplens::cli
