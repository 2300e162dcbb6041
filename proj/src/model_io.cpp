#include "skewcert/model_io.hpp"

#include <algorithm>

namespace skewcert {

using textfmt::hex;
using textfmt::parse_double;
using textfmt::parse_uint;

namespace {

void append_complex(std::string& s, Complex z) {
    s += ' ';
    s += hex(z.real());
    s += ' ';
    s += hex(z.imag());
}

void append_grid(std::string& s, const char* key, const Grid& g) {
    s += key;
    s += ' ' + hex(g.half_width) + ' ' + std::to_string(g.level) + '\n';
}

class LineReader {
public:
    explicit LineReader(std::vector<std::string> lines) : lines_(std::move(lines)) {}

    std::vector<std::string_view> next(std::string_view key, std::size_t fields) {
        if (pos_ >= lines_.size()) throw FormatError("unexpected end of file, wanted '" + std::string(key) + "'");
        auto parts = textfmt::split_ws(lines_[pos_]);
        if (parts.empty() || parts[0] != key || parts.size() != fields + 1) {
            throw FormatError("line " + std::to_string(pos_ + 1) + ": expected '" + std::string(key) + "' with " +
                              std::to_string(fields) + " fields");
        }
        ++pos_;
        parts.erase(parts.begin());
        return parts;
    }
    std::string_view peek_key() const {
        if (pos_ >= lines_.size()) return {};
        auto parts = textfmt::split_ws(lines_[pos_]);
        return parts.empty() ? std::string_view{} : parts[0];
    }
    bool done() const { return pos_ >= lines_.size(); }

private:
    std::vector<std::string> lines_;
    std::size_t pos_ = 0;
};

Grid read_grid(LineReader& in, std::string_view key) {
    const auto f = in.next(key, 2);
    const std::uint64_t level = parse_uint(f[1]);
    try {
        return Grid::make(parse_double(f[0]), static_cast<int>(std::min<std::uint64_t>(level, 99)));
    } catch (const std::invalid_argument& e) {
        throw FormatError(e.what());
    }
}

Complex read_complex(const std::vector<std::string_view>& f, std::size_t at) {
    return {parse_double(f[at]), parse_double(f[at + 1])};
}

}  // namespace

std::string serialize_model(const ChainModel& model) {
    const ModelProvenance& p = model.provenance;
    std::string s = "BCRM v1\n";
    s += model.is_fibered() ? "kind fibered\n" : "kind base\n";
    s += "map";
    append_complex(s, p.map.a);
    append_complex(s, p.map.b);
    append_complex(s, p.map.c);
    append_complex(s, p.map.e);
    s += '\n';
    append_grid(s, "zgrid", p.zgrid);
    if (p.wgrid) append_grid(s, "wgrid", *p.wgrid);
    s += "delta " + hex(p.delta) + '\n';
    s += "timestamp " + std::to_string(p.timestamp) + '\n';
    s += "dropped " + std::to_string(p.dropped_sources) + '\n';
    s += "components " + std::to_string(model.components.size()) + '\n';
    for (std::size_t i = 0; i < model.components.size(); ++i) {
        const ChainComponent& c = model.components[i];
        s += "component " + std::to_string(i) + ' ' + std::to_string(c.vertex_count()) + ' ' +
             std::to_string(c.edge_count()) + '\n';
        for (const BoxId& b : c.boxes) {
            s += "v " + std::to_string(b.z);
            if (p.wgrid) s += ' ' + std::to_string(b.w);
            s += '\n';
        }
        for (VertexIndex k = 0; k < c.vertex_count(); ++k) {
            for (VertexIndex j : c.edges.successors(k)) {
                s += "e " + std::to_string(k) + ' ' + std::to_string(j) + '\n';
            }
        }
    }
    return textfmt::seal(std::move(s));
}

ChainModel parse_model(std::string_view text) {
    LineReader in(textfmt::unseal(text));
    if (in.peek_key() != "BCRM") throw FormatError("not a model file");
    const auto ver = in.next("BCRM", 1);
    if (ver[0] != "v1") throw FormatError("unsupported model version '" + std::string(ver[0]) + "'");

    const auto kind = in.next("kind", 1);
    if (kind[0] != "base" && kind[0] != "fibered") throw FormatError("unknown model kind");
    const bool fibered = kind[0] == "fibered";

    ChainModel model;
    ModelProvenance& p = model.provenance;
    const auto mf = in.next("map", 8);
    p.map = {read_complex(mf, 0), read_complex(mf, 2), read_complex(mf, 4), read_complex(mf, 6)};
    p.zgrid = read_grid(in, "zgrid");
    if (fibered) p.wgrid = read_grid(in, "wgrid");
    p.delta = parse_double(in.next("delta", 1)[0]);
    p.timestamp = parse_uint(in.next("timestamp", 1)[0]);
    p.dropped_sources = parse_uint(in.next("dropped", 1)[0]);
    const std::uint64_t count = parse_uint(in.next("components", 1)[0]);

    for (std::uint64_t i = 0; i < count; ++i) {
        const auto h = in.next("component", 3);
        if (parse_uint(h[0]) != i) throw FormatError("component ids out of order");
        const std::uint64_t nv = parse_uint(h[1]);
        const std::uint64_t ne = parse_uint(h[2]);
        ChainComponent c;
        for (std::uint64_t k = 0; k < nv; ++k) {
            const auto f = in.next("v", fibered ? 2 : 1);
            BoxId b{static_cast<CellId>(parse_uint(f[0])), fibered ? static_cast<CellId>(parse_uint(f[1])) : 0};
            if (b.z >= p.zgrid.cell_count() || (fibered && b.w >= p.wgrid->cell_count())) {
                throw FormatError("cell id outside its grid");
            }
            if (!c.boxes.empty() && !(c.boxes.back() < b)) throw FormatError("vertices not strictly ascending");
            c.boxes.push_back(b);
        }
        std::vector<std::pair<VertexIndex, VertexIndex>> edges;
        edges.reserve(ne);
        for (std::uint64_t k = 0; k < ne; ++k) {
            const auto f = in.next("e", 2);
            const std::uint64_t from = parse_uint(f[0]);
            const std::uint64_t to = parse_uint(f[1]);
            if (from >= nv || to >= nv) throw FormatError("edge endpoint out of range");
            edges.emplace_back(static_cast<VertexIndex>(from), static_cast<VertexIndex>(to));
        }
        c.edges = Digraph::from_edges(nv, std::move(edges));
        if (c.edges.edge_count() != ne) throw FormatError("duplicate edges");
        model.components.push_back(std::move(c));
    }
    if (!in.done()) throw FormatError("trailing content after last component");
    return model;
}

void save_model(const ChainModel& model, const std::string& path) { textfmt::write_file(path, serialize_model(model)); }

ChainModel load_model(const std::string& path) { return parse_model(textfmt::read_file(path)); }

}  // namespace skewcert
