#include "netbound/model_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace netbound {

namespace {

constexpr std::string_view kHeader = "netbound-model v1";

void put_double(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

void put_numbers(std::string& out, const std::vector<double>& vs) {
    for (double v : vs) {
        out += ' ';
        put_double(out, v);
    }
}

struct Cursor {
    std::vector<std::pair<int, std::string>> lines;  // (line number, content)
    std::size_t pos = 0;

    bool done() const { return pos >= lines.size(); }
    int line() const { return done() ? (lines.empty() ? 1 : lines.back().first) : lines[pos].first; }
    const std::string& peek() const { return lines[pos].second; }
    std::string take() { return lines[pos++].second; }
};

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

double parse_double(const std::string& tok, int line) {
    double v = 0.0;
    const char* b = tok.data();
    const char* e = b + tok.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e) throw ModelParseError(line, "bad number '" + tok + "'");
    return v;
}

std::size_t parse_size(const std::string& tok, int line) {
    std::size_t v = 0;
    const char* b = tok.data();
    const char* e = b + tok.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e)
        throw ModelParseError(line, "bad non-negative integer '" + tok + "'");
    return v;
}

std::vector<double> parse_doubles(const std::vector<std::string>& toks, std::size_t from,
                                  std::size_t count, int line) {
    if (toks.size() - from != count) {
        std::ostringstream os;
        os << "expected " << count << " values, got " << toks.size() - from;
        throw ModelParseError(line, os.str());
    }
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t i = from; i < toks.size(); ++i) out.push_back(parse_double(toks[i], line));
    return out;
}

ActivationSpec activation_by_name(const std::string& name, int line) {
    try {
        return builtin_activation(name);
    } catch (const std::invalid_argument& e) {
        throw ModelParseError(line, e.what());
    }
}

LayerSpec parse_layer(Cursor& cur, const std::string& kind_name, int kind_line) {
    LayerSpec l;
    try {
        l.kind = layer_kind_from_string(kind_name);
    } catch (const std::invalid_argument& e) {
        throw ModelParseError(kind_line, e.what());
    }
    if (l.kind == LayerKind::InverseSigmoid) {
        l.activation.name = "logit";
        l.activation.nondecreasing = true;
    }

    bool saw_dims = false;
    while (!cur.done()) {
        const int line = cur.line();
        auto toks = split_ws(cur.take());
        const std::string& key = toks[0];
        if (key == "end") {
            if (!saw_dims) throw ModelParseError(line, "layer is missing 'dims'");
            return l;
        }
        if (key == "dims") {
            if (toks.size() != 3) throw ModelParseError(line, "dims takes 'in out'");
            l.in_dim = parse_size(toks[1], line);
            l.out_dim = parse_size(toks[2], line);
            saw_dims = true;
        } else if (key == "activation") {
            if (toks.size() != 2) throw ModelParseError(line, "activation takes one name");
            if (l.kind == LayerKind::InverseSigmoid)
                throw ModelParseError(line, "inverse_sigmoid has a fixed activation");
            l.activation = activation_by_name(toks[1], line);
        } else if (key == "gate_activation") {
            if (toks.size() != 2) throw ModelParseError(line, "gate_activation takes one name");
            l.gate_activation = activation_by_name(toks[1], line);
        } else if (key == "weights") {
            if (!saw_dims) throw ModelParseError(line, "'dims' must precede 'weights'");
            Matrix m(l.out_dim, l.in_dim);
            m.a = parse_doubles(toks, 1, l.out_dim * l.in_dim, line);
            l.weights = std::move(m);
        } else if (key == "bias") {
            if (!saw_dims) throw ModelParseError(line, "'dims' must precede 'bias'");
            l.bias = parse_doubles(toks, 1, l.out_dim, line);
        } else if (key == "param") {
            if (toks.size() < 4) throw ModelParseError(line, "param takes 'name rows cols values...'");
            const std::string& name = toks[1];
            Matrix m(parse_size(toks[2], line), parse_size(toks[3], line));
            m.a = parse_doubles(toks, 4, m.rows * m.cols, line);
            if (l.extra.count(name)) throw ModelParseError(line, "duplicate param '" + name + "'");
            l.extra[name] = std::move(m);
        } else {
            throw ModelParseError(line, "unknown field '" + key + "' in layer block");
        }
    }
    throw ModelParseError(cur.line(), "unterminated layer block (missing 'end')");
}

}  // namespace

std::string serialize_model(const NetworkGraph& g) {
    std::string out;
    out += kHeader;
    out += '\n';
    out += "input_dim " + std::to_string(g.input_dim) + '\n';
    out += "output_dim " + std::to_string(g.output_dim) + '\n';
    out += "lookback " + std::to_string(g.lookback) + '\n';

    for (const LayerSpec& l : g.layers) {
        out += "layer ";
        out += to_string(l.kind);
        out += '\n';
        out += "  dims " + std::to_string(l.in_dim) + ' ' + std::to_string(l.out_dim) + '\n';
        if (l.kind != LayerKind::InverseSigmoid) {
            out += "  activation " + l.activation.name + '\n';
        }
        if (l.gate_activation) out += "  gate_activation " + l.gate_activation->name + '\n';
        if (!l.weights.empty()) {
            out += "  weights";
            put_numbers(out, l.weights.a);
            out += '\n';
        }
        if (!l.bias.empty()) {
            out += "  bias";
            put_numbers(out, l.bias);
            out += '\n';
        }
        for (const auto& [name, m] : l.extra) {
            out += "  param " + name + ' ' + std::to_string(m.rows) + ' ' +
                   std::to_string(m.cols);
            put_numbers(out, m.a);
            out += '\n';
        }
        out += "end\n";
    }

    for (const SkipEdge& e : g.skip_edges) {
        out += "skip_edge " + std::to_string(e.source) + ' ' + std::to_string(e.target);
        if (e.projection) {
            out += " matrix " + std::to_string(e.projection->rows) + ' ' +
                   std::to_string(e.projection->cols);
            put_numbers(out, e.projection->a);
        } else {
            out += " identity";
        }
        out += '\n';
    }
    return out;
}

NetworkGraph deserialize_model(std::string_view text) {
    Cursor cur;
    {
        int n = 0;
        std::size_t start = 0;
        while (start <= text.size()) {
            std::size_t nl = text.find('\n', start);
            if (nl == std::string_view::npos) nl = text.size();
            std::string line(text.substr(start, nl - start));
            ++n;
            // strip comments and blank lines
            if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                cur.lines.emplace_back(n, line);
            if (nl == text.size()) break;
            start = nl + 1;
        }
    }

    if (cur.done() || cur.take() != kHeader)
        throw ModelParseError(1, std::string("expected header '") + std::string(kHeader) + "'");

    NetworkGraph g;
    bool saw_input = false, saw_output = false;
    while (!cur.done()) {
        const int line = cur.line();
        auto toks = split_ws(cur.take());
        const std::string& key = toks[0];
        if (key == "input_dim") {
            if (toks.size() != 2) throw ModelParseError(line, "input_dim takes one value");
            g.input_dim = parse_size(toks[1], line);
            saw_input = true;
        } else if (key == "output_dim") {
            if (toks.size() != 2) throw ModelParseError(line, "output_dim takes one value");
            g.output_dim = parse_size(toks[1], line);
            saw_output = true;
        } else if (key == "lookback") {
            if (toks.size() != 2) throw ModelParseError(line, "lookback takes one value");
            g.lookback = parse_size(toks[1], line);
        } else if (key == "layer") {
            if (toks.size() != 2) throw ModelParseError(line, "layer takes one kind");
            g.layers.push_back(parse_layer(cur, toks[1], line));
        } else if (key == "skip_edge") {
            if (toks.size() < 4) throw ModelParseError(line, "skip_edge takes 'source target proj'");
            SkipEdge e;
            e.source = parse_size(toks[1], line);
            e.target = parse_size(toks[2], line);
            if (toks[3] == "identity") {
                if (toks.size() != 4) throw ModelParseError(line, "identity projection takes no values");
            } else if (toks[3] == "matrix") {
                if (toks.size() < 6) throw ModelParseError(line, "matrix projection takes 'rows cols values...'");
                Matrix m(parse_size(toks[4], line), parse_size(toks[5], line));
                m.a = parse_doubles(toks, 6, m.rows * m.cols, line);
                e.projection = std::move(m);
            } else {
                throw ModelParseError(line, "projection must be 'identity' or 'matrix'");
            }
            g.skip_edges.push_back(std::move(e));
        } else {
            throw ModelParseError(line, "unknown field '" + key + "'");
        }
    }

    if (!saw_input || !saw_output)
        throw ModelParseError(cur.line(), "missing input_dim/output_dim");
    try {
        g.validate();
    } catch (const std::invalid_argument& e) {
        throw ModelParseError(cur.line(), std::string("invalid graph: ") + e.what());
    }
    return g;
}

void save_model(const std::filesystem::path& path, const NetworkGraph& g) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << serialize_model(g);
    if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

NetworkGraph load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize_model(buf.str());
}

}  // namespace netbound
