#include "sbiga/geometry_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "sbiga/errors.hpp"

namespace sbiga::io {

namespace {

struct Line {
    int number = 0;
    std::string keyword;
    std::vector<std::string> tokens;
};

std::vector<Line> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw SchemaError("cannot open '" + path.string() + "'", 0);
    }
    std::vector<Line> lines;
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
        ++number;
        if (const auto hash = raw.find('#'); hash != std::string::npos) {
            raw.erase(hash);
        }
        std::istringstream stream(raw);
        Line line;
        line.number = number;
        std::string token;
        while (stream >> token) {
            if (line.keyword.empty()) {
                line.keyword = token;
            } else {
                line.tokens.push_back(token);
            }
        }
        if (!line.keyword.empty()) {
            lines.push_back(std::move(line));
        }
    }
    return lines;
}

double parse_number(const std::string& token, int line) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        throw SchemaError("expected a number, got '" + token + "'", line);
    }
    return value;
}

int parse_int(const std::string& token, int line) {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        throw SchemaError("expected an integer, got '" + token + "'", line);
    }
    return value;
}

std::string format_number(double value) {
    char buf[64];
    const auto [ptr, ec] =
        std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
    return std::string(buf, ptr);
}

struct Document {
    std::map<std::string, Line> fields;
    std::vector<Line> point_lines;
    std::vector<Line> weight_lines;
    int control_header_line = 0;
};

Document parse_document(const std::vector<Line>& lines) {
    Document doc;
    enum class Block { Header, Points, Weights };
    Block block = Block::Header;
    std::size_t expected_points = 0;

    for (const Line& line : lines) {
        if (block == Block::Points && doc.point_lines.size() < expected_points) {
            if (line.keyword == "weights") {
                throw SchemaError("control point block ended early", line.number);
            }
            doc.point_lines.push_back(line);
            continue;
        }
        if (block == Block::Weights && doc.weight_lines.size() < expected_points) {
            doc.weight_lines.push_back(line);
            continue;
        }
        if (line.keyword == "control_points") {
            doc.control_header_line = line.number;
            doc.fields["control_points"] = line;
            std::size_t count = 1;
            for (const auto& tok : line.tokens) {
                count *= static_cast<std::size_t>(parse_int(tok, line.number));
            }
            expected_points = count;
            block = Block::Points;
            continue;
        }
        if (line.keyword == "weights") {
            block = Block::Weights;
            continue;
        }
        if (doc.fields.count(line.keyword)) {
            throw SchemaError("duplicate field '" + line.keyword + "'", line.number);
        }
        doc.fields[line.keyword] = line;
        block = Block::Header;
    }
    if (doc.point_lines.size() != expected_points) {
        throw SchemaError("expected " + std::to_string(expected_points) +
                              " control point lines, got " + std::to_string(doc.point_lines.size()),
                          doc.control_header_line);
    }
    if (!doc.weight_lines.empty() && doc.weight_lines.size() != expected_points) {
        throw SchemaError("weight block must match the control point count",
                          doc.weight_lines.front().number);
    }
    return doc;
}

const Line& require_field(const Document& doc, const std::string& key) {
    const auto it = doc.fields.find(key);
    if (it == doc.fields.end()) {
        throw SchemaError("missing required field '" + key + "'", 0);
    }
    return it->second;
}

void check_magic(const Document& doc) {
    const Line& magic = require_field(doc, "sbgeo");
    if (magic.tokens.size() != 1 || magic.tokens[0] != "1") {
        throw SchemaError("unsupported document version", magic.number);
    }
}

std::string document_type(const Document& doc) {
    const Line& type = require_field(doc, "type");
    if (type.tokens.size() != 1 || (type.tokens[0] != "map" && type.tokens[0] != "curve")) {
        throw SchemaError("type must be 'map' or 'curve'", type.number);
    }
    return type.tokens[0];
}

std::vector<double> parse_knots(const Line& line) {
    std::vector<double> knots;
    knots.reserve(line.tokens.size());
    for (const auto& tok : line.tokens) {
        knots.push_back(parse_number(tok, line.number));
    }
    return knots;
}

KnotVector make_kv(const Line& knot_line, int degree) {
    try {
        return KnotVector(parse_knots(knot_line), degree);
    } catch (const Error& e) {
        throw SchemaError(e.what(), knot_line.number);
    }
}

}  // namespace

DocumentType peek_type(const std::filesystem::path& path) {
    const Document doc = parse_document(read_lines(path));
    check_magic(doc);
    return document_type(doc) == "map" ? DocumentType::Map : DocumentType::Curve;
}

CurveGeometry read_curve(const std::filesystem::path& path) {
    const Document doc = parse_document(read_lines(path));
    check_magic(doc);
    if (document_type(doc) != "curve") {
        throw SchemaError("expected a curve document", require_field(doc, "type").number);
    }
    const Line& deg = require_field(doc, "degree");
    if (deg.tokens.size() != 1) {
        throw SchemaError("degree takes one value", deg.number);
    }
    const KnotVector kv = make_kv(require_field(doc, "knots"), parse_int(deg.tokens[0], deg.number));

    const Line& header = require_field(doc, "control_points");
    if (header.tokens.size() != 1) {
        throw SchemaError("curve control_points header takes one count", header.number);
    }
    std::vector<Eigen::Vector2d> pts;
    for (const Line& line : doc.point_lines) {
        const std::size_t have = line.tokens.size() + 1;
        if (have != 2) {
            throw SchemaError("control point line needs two coordinates", line.number);
        }
        pts.emplace_back(parse_number(line.keyword, line.number),
                         parse_number(line.tokens[0], line.number));
    }
    std::vector<double> weights;
    for (const Line& line : doc.weight_lines) {
        if (!line.tokens.empty()) {
            throw SchemaError("weight line takes one value", line.number);
        }
        weights.push_back(parse_number(line.keyword, line.number));
    }

    bool closed = false;
    if (const auto it = doc.fields.find("closed"); it != doc.fields.end()) {
        closed = it->second.tokens.size() == 1 && it->second.tokens[0] == "true";
    } else if (!pts.empty()) {
        closed = (pts.front() - pts.back()).norm() <= 1e-12;
    }
    try {
        return CurveGeometry(kv, std::move(pts), std::move(weights), closed);
    } catch (const Error& e) {
        throw SchemaError(e.what(), header.number);
    }
}

GeometryMap read_map(const std::filesystem::path& path) {
    const Document doc = parse_document(read_lines(path));
    check_magic(doc);
    if (document_type(doc) != "map") {
        throw SchemaError("expected a map document", require_field(doc, "type").number);
    }
    const Line& degr = require_field(doc, "degree_radial");
    const Line& degc = require_field(doc, "degree_circumferential");
    const KnotVector radial_kv =
        make_kv(require_field(doc, "knots_radial"), parse_int(degr.tokens.at(0), degr.number));
    const KnotVector circ_kv = make_kv(require_field(doc, "knots_circumferential"),
                                       parse_int(degc.tokens.at(0), degc.number));

    const Line& header = require_field(doc, "control_points");
    if (header.tokens.size() != 2) {
        throw SchemaError("map control_points header takes counts m n", header.number);
    }
    const int m = parse_int(header.tokens[0], header.number);
    const int n = parse_int(header.tokens[1], header.number);
    if (m != radial_kv.num_basis() || n != circ_kv.num_basis()) {
        throw SchemaError("control grid " + std::to_string(m) + " x " + std::to_string(n) +
                              " does not match the basis counts " +
                              std::to_string(radial_kv.num_basis()) + " x " +
                              std::to_string(circ_kv.num_basis()),
                          header.number);
    }

    Eigen::MatrixXd nx(m, n);
    Eigen::MatrixXd ny(m, n);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            const Line& line = doc.point_lines[static_cast<std::size_t>(i) * n + j];
            if (line.tokens.size() != 1) {
                throw SchemaError("control point line needs two coordinates", line.number);
            }
            nx(i, j) = parse_number(line.keyword, line.number);
            ny(i, j) = parse_number(line.tokens[0], line.number);
        }
    }
    Eigen::MatrixXd weights;
    if (!doc.weight_lines.empty()) {
        weights.resize(m, n);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < n; ++j) {
                const Line& line = doc.weight_lines[static_cast<std::size_t>(i) * n + j];
                if (!line.tokens.empty()) {
                    throw SchemaError("weight line takes one value", line.number);
                }
                weights(i, j) = parse_number(line.keyword, line.number);
            }
        }
    }

    std::string orientation = "center-to-boundary";
    if (const auto it = doc.fields.find("orientation"); it != doc.fields.end()) {
        if (it->second.tokens.size() != 1 ||
            (it->second.tokens[0] != "center-to-boundary" &&
             it->second.tokens[0] != "boundary-to-center")) {
            throw SchemaError("orientation must be center-to-boundary or boundary-to-center",
                              it->second.number);
        }
        orientation = it->second.tokens[0];
    }
    if (orientation == "boundary-to-center") {
        nx = nx.colwise().reverse().eval();
        ny = ny.colwise().reverse().eval();
        if (weights.size() > 0) {
            weights = weights.colwise().reverse().eval();
        }
    }

    std::optional<Eigen::Vector2d> center;
    if (const auto it = doc.fields.find("scaling_center"); it != doc.fields.end()) {
        if (it->second.tokens.size() != 2) {
            throw SchemaError("scaling_center takes two coordinates", it->second.number);
        }
        center = Eigen::Vector2d(parse_number(it->second.tokens[0], it->second.number),
                                 parse_number(it->second.tokens[1], it->second.number));
    }

    const SbStructure structure = detect_structure(nx, ny, weights, center);
    try {
        return GeometryMap(radial_kv, circ_kv, std::move(nx), std::move(ny), std::move(weights),
                           center, structure);
    } catch (const Error& e) {
        throw SchemaError(e.what(), header.number);
    }
}

namespace {

void write_header(std::ofstream& out, const std::string& type, const std::string& kind) {
    out << "sbgeo 1\n";
    out << "type " << type << "\n";
    if (!kind.empty()) {
        out << "kind " << kind << "\n";
    }
}

}  // namespace

void write_curve(const std::filesystem::path& path, const CurveGeometry& curve,
                 const std::string& kind) {
    std::ofstream out(path);
    if (!out) {
        throw SchemaError("cannot write '" + path.string() + "'", 0);
    }
    write_header(out, "curve", kind);
    out << "degree " << curve.knot_vector().degree() << "\n";
    out << "knots";
    for (double k : curve.knot_vector().knots()) {
        out << " " << format_number(k);
    }
    out << "\n";
    out << "closed " << (curve.closed() ? "true" : "false") << "\n";
    out << "control_points " << curve.num_points() << "\n";
    for (const auto& p : curve.control_points()) {
        out << format_number(p.x()) << " " << format_number(p.y()) << "\n";
    }
    if (curve.rational()) {
        out << "weights\n";
        for (double w : curve.weights()) {
            out << format_number(w) << "\n";
        }
    }
}

void write_map(const std::filesystem::path& path, const GeometryMap& map,
               const std::string& kind) {
    std::ofstream out(path);
    if (!out) {
        throw SchemaError("cannot write '" + path.string() + "'", 0);
    }
    write_header(out, "map", kind);
    out << "orientation center-to-boundary\n";
    out << "degree_radial " << map.radial_kv().degree() << "\n";
    out << "degree_circumferential " << map.circ_kv().degree() << "\n";
    out << "knots_radial";
    for (double k : map.radial_kv().knots()) {
        out << " " << format_number(k);
    }
    out << "\n";
    out << "knots_circumferential";
    for (double k : map.circ_kv().knots()) {
        out << " " << format_number(k);
    }
    out << "\n";
    if (map.scaling_center()) {
        out << "scaling_center " << format_number(map.scaling_center()->x()) << " "
            << format_number(map.scaling_center()->y()) << "\n";
    }
    out << "control_points " << map.num_radial() << " " << map.num_circ() << "\n";
    for (int i = 0; i < map.num_radial(); ++i) {
        for (int j = 0; j < map.num_circ(); ++j) {
            out << format_number(map.net_x()(i, j)) << " " << format_number(map.net_y()(i, j))
                << "\n";
        }
    }
    if (map.rational()) {
        out << "weights\n";
        for (int i = 0; i < map.num_radial(); ++i) {
            for (int j = 0; j < map.num_circ(); ++j) {
                out << format_number(map.weights()(i, j)) << "\n";
            }
        }
    }
}

}  // namespace sbiga::io
