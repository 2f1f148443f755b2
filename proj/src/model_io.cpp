#include "contour/model_io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <sstream>

namespace contour {

namespace {

class ByteSink {
public:
    void u8(std::uint8_t v) { bytes.push_back(v); }
    void be(std::uint64_t v, int width) {
        for (int i = width - 1; i >= 0; --i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f64(double v) { be(std::bit_cast<std::uint64_t>(v), 8); }
    void magic(const char* m) {
        for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(m[i]));
    }
    std::vector<std::uint8_t> bytes;
};

class ByteSource {
public:
    explicit ByteSource(std::span<const std::uint8_t> b) : b_(b) {}
    std::uint64_t be(int width) {
        if (pos_ + static_cast<std::size_t>(width) > b_.size()) throw DecodeError("model file truncated");
        std::uint64_t v = 0;
        for (int i = 0; i < width; ++i) v = (v << 8) | b_[pos_++];
        return v;
    }
    double f64() { return std::bit_cast<double>(be(8)); }
    void expect_magic(const char* m) {
        for (int i = 0; i < 4; ++i)
            if (be(1) != static_cast<std::uint8_t>(m[i])) throw DecodeError(std::string("bad magic, expected ") + m);
    }
    bool done() const { return pos_ == b_.size(); }

private:
    std::span<const std::uint8_t> b_;
    std::size_t pos_ = 0;
};

void write_nodes(ByteSink& sink, const ContextTree& tree) {
    const auto order = tree.preorder();
    sink.be(order.size(), 4);
    for (auto id : order) {
        const auto& n = tree.node(id);
        sink.u8(n.depth);
        sink.u8(id == ContextTree::kRoot ? 3 : static_cast<std::uint8_t>(n.label));
        for (double c : n.counts) sink.f64(c);
    }
}

ContextTree read_nodes(ByteSource& src) {
    const auto count = src.be(4);
    if (count == 0) throw DecodeError("tree has no root record");
    ContextTree tree;
    std::vector<std::int32_t> path; // path[d] = node id at depth d on the current branch
    for (std::uint64_t i = 0; i < count; ++i) {
        const auto depth = static_cast<std::size_t>(src.be(1));
        const auto label = src.be(1);
        SymbolCounts counts{};
        for (auto& c : counts) {
            c = src.f64();
            if (!std::isfinite(c) || c < 0.0) throw DecodeError("tree record has an invalid count");
        }
        if (i == 0) {
            if (depth != 0 || label != 3) throw DecodeError("first tree record must be the root");
            tree.node(ContextTree::kRoot).counts = counts;
            path.assign(1, ContextTree::kRoot);
            continue;
        }
        if (depth == 0 || depth > path.size() || label > 2) throw DecodeError("tree record out of preorder");
        path.resize(depth);
        const auto parent = path.back();
        const auto s = static_cast<Symbol>(label);
        if (tree.child(parent, s) >= 0) throw DecodeError("duplicate tree record");
        path.push_back(tree.add_child(parent, s, counts));
    }
    return tree;
}

long long to_millis(double v) { return std::llround(v * 1000.0); }

} // namespace

std::vector<std::uint8_t> serialize_model(const TrainedModel& model) {
    ByteSink sink;
    sink.magic("CTM1");
    sink.be(static_cast<std::uint64_t>(model.params.depth), 2);
    sink.be(static_cast<std::uint64_t>(model.params.budget), 4);
    sink.be(static_cast<std::uint32_t>(static_cast<std::int32_t>(to_millis(model.params.a))), 4);
    sink.be(static_cast<std::uint64_t>(to_millis(model.params.beta)), 4);
    sink.be(model.training_size, 8);
    write_nodes(sink, model.tree);
    return std::move(sink.bytes);
}

TrainedModel parse_model(std::span<const std::uint8_t> bytes) {
    ByteSource src(bytes);
    src.expect_magic("CTM1");
    TrainedModel m;
    m.params.depth = static_cast<int>(src.be(2));
    m.params.budget = static_cast<int>(src.be(4));
    m.params.a = static_cast<double>(static_cast<std::int32_t>(static_cast<std::uint32_t>(src.be(4)))) / 1000.0;
    m.params.beta = static_cast<double>(src.be(4)) / 1000.0;
    m.training_size = src.be(8);
    m.tree = read_nodes(src);
    if (!src.done()) throw DecodeError("trailing bytes after model");
    if (!m.tree.is_full()) throw DecodeError("model tree is not full");
    return m;
}

std::vector<std::uint8_t> serialize_tree(const ContextTree& tree) {
    ByteSink sink;
    sink.magic("CTS1");
    write_nodes(sink, tree);
    return std::move(sink.bytes);
}

ContextTree parse_tree(std::span<const std::uint8_t> bytes) {
    ByteSource src(bytes);
    src.expect_magic("CTS1");
    auto tree = read_nodes(src);
    if (!src.done()) throw DecodeError("trailing bytes after tree");
    return tree;
}

std::string dump_tree_text(const ContextTree& tree) {
    std::ostringstream out;
    out << std::setprecision(17);
    for (auto id : tree.preorder()) {
        const auto& n = tree.node(id);
        out << std::string(n.depth * 2U, ' ');
        const auto ctx = tree.context_string(id);
        out << (ctx.empty() ? "<root>" : ctx) << ' ' << n.counts[0] << ' ' << n.counts[1] << ' ' << n.counts[2]
            << (n.is_leaf() ? " *" : "") << '\n';
    }
    return out.str();
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t model_hash(const TrainedModel& model) { return fnv1a64(serialize_model(model)); }

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp);
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw Error("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

void write_file_text(const std::string& path, const std::string& text) {
    write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

} // namespace contour
