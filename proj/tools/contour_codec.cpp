#include "contour/lossless_codec.hpp"
#include "contour/lossy_codec.hpp"
#include "contour/mask.hpp"
#include "contour/model_io.hpp"
#include "contour/synthetic.hpp"
#include "contour/training.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using namespace contour;

namespace {

unsigned thread_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("CONTOUR_CODEC_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return n;
}

/// Runs body(i) for i in [0, n) on a small pool; results land by index.
template <class F>
void parallel_for(std::size_t n, F&& body) {
    const auto workers = std::min<std::size_t>(thread_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i; (i = next++) < n;) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

/// Contour text with an optional "# size W H" line.
EncodedImage read_contour_file(const std::string& path) {
    const auto bytes = read_file_bytes(path);
    const std::string text(bytes.begin(), bytes.end());
    EncodedImage img;
    img.contours = read_contour_text(text);
    std::istringstream lines(text);
    bool sized = false;
    for (std::string line; std::getline(lines, line);) {
        std::istringstream in(line);
        std::string hash, key;
        long w = 0, h = 0;
        if (in >> hash >> key >> w >> h && hash == "#" && key == "size") {
            if (w < 0 || h < 0 || w > 65535 || h > 65535) throw FormatError(path + ": bad size line");
            img.width = static_cast<std::uint16_t>(w);
            img.height = static_cast<std::uint16_t>(h);
            sized = true;
            break;
        }
    }
    if (!sized) {
        std::int64_t w = 0, h = 0;
        for (const auto& c : img.contours)
            for (auto p : endpoints(c)) {
                if (p.x < 0 || p.y < 0) throw FormatError(path + ": negative coordinate without a size line");
                w = std::max<std::int64_t>(w, p.x);
                h = std::max<std::int64_t>(h, p.y);
            }
        if (w > 65535 || h > 65535) throw FormatError(path + ": contours exceed 65535");
        img.width = static_cast<std::uint16_t>(w);
        img.height = static_cast<std::uint16_t>(h);
    }
    return img;
}

std::string contour_file_text(const EncodedImage& img) {
    if (img.contours.empty()) return {};
    return "# size " + std::to_string(img.width) + " " + std::to_string(img.height) + "\n" +
           write_contour_text(img.contours);
}

/// Files named on the command line, with directories expanded in sorted order.
std::vector<std::string> expand_inputs(const std::vector<std::string>& inputs) {
    std::vector<std::string> out;
    for (const auto& in : inputs) {
        if (fs::is_directory(in)) {
            std::vector<std::string> found;
            for (const auto& e : fs::directory_iterator(in)) {
                const auto ext = e.path().extension();
                if (e.is_regular_file() && (ext == ".pbm" || ext == ".dcc")) found.push_back(e.path().string());
            }
            std::sort(found.begin(), found.end());
            out.insert(out.end(), found.begin(), found.end());
        } else {
            out.push_back(in);
        }
    }
    return out;
}

std::vector<DccContour> load_contours(const std::string& path) {
    if (fs::path(path).extension() == ".pbm") return trace_mask(read_pbm_file(path));
    return read_contour_file(path).contours;
}

CodingModel load_model(const std::string& path) { return CodingModel(parse_model(read_file_bytes(path))); }

std::vector<double> parse_grid(const std::string& list, const char* what) {
    std::vector<double> out;
    std::stringstream ss(list);
    for (std::string item; std::getline(ss, item, ',');) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size() || !std::isfinite(v) || v < 0)
            throw Error(std::string("bad ") + what + " value '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw Error(std::string("empty ") + what + " grid");
    return out;
}

RdMode parse_mode(const std::string& m) {
    if (m == "ssdd") return RdMode::Ssdd;
    if (m == "madd") return RdMode::Madd;
    throw Error("mode must be ssdd or madd");
}

struct TreeFlags {
    int depth = 0;
    int budget = 0;
    double a = 0.25;
    double beta = 1.0;
};

void add_tree_flags(CLI::App* cmd, TreeFlags& f) {
    cmd->add_option("--depth", f.depth, "Maximum context length D (default ceil(ln L / ln 3))");
    cmd->add_option("--budget", f.budget, "Initial context budget K (default 3 D^3)");
    cmd->add_option("--a", f.a, "Prior weight coefficient")->check(CLI::NonNegativeNumber);
    cmd->add_option("--beta", f.beta, "Lookup smoothing")->check(CLI::NonNegativeNumber);
}

int cmd_trace(const std::vector<std::string>& inputs, const std::string& out_dir, std::optional<std::uint64_t> suite) {
    fs::create_directories(out_dir);
    int status = 0;
    if (suite) {
        const auto masks = synthetic_mask_suite(*suite);
        for (std::size_t i = 0; i < masks.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof name, "suite_%02zu", i);
            const auto base = fs::path(out_dir) / name;
            write_file_text(base.string() + ".pbm", write_pbm_ascii(masks[i]));
            const EncodedImage img{static_cast<std::uint16_t>(masks[i].width()),
                                   static_cast<std::uint16_t>(masks[i].height()), trace_mask(masks[i])};
            write_file_text(base.string() + ".dcc", contour_file_text(img));
        }
        std::cout << "wrote " << masks.size() << " synthetic masks to " << out_dir << "\n";
    }
    for (const auto& path : expand_inputs(inputs)) {
        try {
            const auto mask = read_pbm_file(path);
            if (mask.width() > 65535 || mask.height() > 65535) throw FormatError("mask larger than 65535");
            const EncodedImage img{static_cast<std::uint16_t>(mask.width()), static_cast<std::uint16_t>(mask.height()),
                                   trace_mask(mask)};
            const auto out = (fs::path(out_dir) / fs::path(path).stem()).string() + ".dcc";
            write_file_text(out, contour_file_text(img));
            std::cout << path << ": " << img.contours.size() << " contours -> " << out << "\n";
        } catch (const FormatError& e) {
            std::cerr << path << ": " << e.what() << "\n";
            status = 2;
        }
    }
    return status;
}

int cmd_train(const std::vector<std::string>& inputs, const std::string& out, const TreeFlags& flags,
              std::size_t markov, std::uint64_t seed, const std::string& dump) {
    TrainingCorpus corpus;
    for (const auto& path : expand_inputs(inputs))
        for (const auto& c : load_contours(path)) corpus.strings.push_back(c.symbols);
    if (markov > 0) {
        Rng rng(seed);
        corpus.strings.push_back(MarkovSource::outline_like().generate(markov, rng));
    }
    TreeParams p;
    p.depth = flags.depth;
    p.budget = flags.budget;
    // The model file keeps these in thousandths.
    p.a = std::round(flags.a * 1000.0) / 1000.0;
    p.beta = std::round(flags.beta * 1000.0) / 1000.0;
    TrainingReport r;
    const auto model = train(corpus, p, &r);
    write_file_bytes(out, serialize_model(model));
    if (!dump.empty()) write_file_text(dump, dump_tree_text(model.tree));
    std::cout.precision(12);
    std::cout << "L " << r.training_size << "\nM " << r.string_count << "\nD " << r.params.depth << "\nK "
              << r.params.budget << "\na " << r.params.a << "\nbeta " << r.params.beta << "\npeak_nodes "
              << r.peak_nodes << "\ninitial_nodes " << r.initial_nodes << "\ninitial_end_nodes " << r.initial_end_nodes
              << "\nend_nodes " << r.end_nodes << "\nF_initial " << r.initial_cost << "\nF_final " << r.cost
              << "\nhash " << std::hex << model_hash(model) << std::dec << "\n";
    return 0;
}

void print_accounting(const EncodeReport& rep) {
    for (std::size_t i = 0; i < rep.coded_contours.size(); ++i)
        std::cout << "contour " << i << " symbols " << rep.coded_contours[i].symbols.size() << " bits "
                  << rep.contour_payload_bits[i] << "\n";
    std::cout << "header_bits " << rep.header_bits << "\nstarting_point_bits " << rep.starting_point_bits
              << "\ncontour_header_bits " << rep.contour_header_bits << "\npayload_bits " << rep.payload_bits
              << "\ntrailer_bits " << rep.trailer_bits << "\ntotal_bits " << rep.total_bits() << "\nsymbols "
              << rep.total_symbols << "\nbits_per_symbol " << rep.bits_per_symbol() << "\n";
}

int cmd_encode(const std::string& model_path, const std::string& input, const std::string& out,
               const std::string& mode, double lambda, double dmax, bool split) {
    const auto model = load_model(model_path);
    auto img = read_contour_file(input);
    if (!mode.empty()) {
        const RdModel rd(model.tree(), model.beta());
        const RdParams params{parse_mode(mode), lambda, dmax};
        std::vector<DccContour> approx(img.contours.size());
        parallel_for(img.contours.size(), [&](std::size_t i) {
            approx[i] = img.contours[i].symbols.empty() ? img.contours[i] : approximate(img.contours[i], rd, params).contour;
        });
        img.contours = std::move(approx);
    }
    EncodeOptions opt;
    if (split) opt.long_contours = LongContourPolicy::Split;
    EncodeReport rep;
    write_file_bytes(out, encode_image(img, model, &rep, opt));
    print_accounting(rep);
    return 0;
}

int cmd_decode(const std::string& model_path, const std::string& input, const std::string& out, bool no_verify) {
    const auto model = load_model(model_path);
    DecodeOptions opt;
    opt.verify_checksum = !no_verify;
    const auto img = decode_image(read_file_bytes(input), model, opt);
    write_file_text(out, contour_file_text(img));
    std::cout << "decoded " << img.contours.size() << " contours (" << img.width << "x" << img.height << ")\n";
    return 0;
}

int cmd_rd_sweep(const std::string& model_path, const std::vector<std::string>& inputs, const std::string& mode,
                 const std::string& lambdas, const std::string& dmaxes, double dmax_fixed, const std::string& csv) {
    const auto model = load_model(model_path);
    const RdModel rd(model.tree(), model.beta());
    const auto m = parse_mode(mode);
    const auto grid = m == RdMode::Ssdd ? parse_grid(lambdas, "lambda") : parse_grid(dmaxes, "dmax");

    struct Job {
        std::string id;
        DccContour x;
        double value;
    };
    std::vector<Job> jobs;
    for (const auto& path : expand_inputs(inputs)) {
        const auto contours = load_contours(path);
        const auto stem = fs::path(path).stem().string();
        for (std::size_t i = 0; i < contours.size(); ++i)
            if (!contours[i].symbols.empty())
                for (double v : grid) jobs.push_back({stem + ":" + std::to_string(i), contours[i], v});
    }
    std::vector<std::string> rows(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t i) {
        const auto& j = jobs[i];
        const RdParams p = m == RdMode::Ssdd ? RdParams{m, j.value, dmax_fixed} : RdParams{m, 0.0, j.value};
        std::ostringstream row;
        row.precision(10);
        row << j.id << "," << mode << "," << j.value << ",";
        try {
            const auto r = approximate(j.x, rd, p);
            row << r.rate_bits << "," << r.ssdd << "," << r.madd << "," << r.states_expanded;
        } catch (const InfeasibleError&) {
            row << "infeasible,infeasible,infeasible,0";
        }
        rows[i] = row.str();
    });
    std::string text = "contour_id,mode,lambda_or_dmax,bits,ssdd,madd,states_expanded\n";
    for (const auto& r : rows) text += r + "\n";
    if (csv.empty()) std::cout << text;
    else write_file_text(csv, text);
    return 0;
}

int cmd_stats(const std::string& model_path, const std::vector<std::string>& inputs, bool dump) {
    const auto model = load_model(model_path);
    const auto& tm = model.model();
    std::cout.precision(12);
    std::cout << "training_size " << tm.training_size << "\nD " << tm.params.depth << "\nK " << tm.params.budget
              << "\na " << tm.params.a << "\nbeta " << tm.params.beta << "\nnodes " << tm.tree.size() << "\nend_nodes "
              << tm.tree.end_nodes().size() << "\nmax_depth " << tm.tree.max_depth() << "\nhash " << std::hex
              << model.hash() << std::dec << "\n";
    if (dump) std::cout << dump_tree_text(tm.tree);
    for (const auto& path : expand_inputs(inputs)) {
        EncodedImage img;
        if (fs::path(path).extension() == ".pbm") {
            const auto mask = read_pbm_file(path);
            img = {static_cast<std::uint16_t>(mask.width()), static_cast<std::uint16_t>(mask.height()), trace_mask(mask)};
        } else {
            img = read_contour_file(path);
        }
        EncodeReport rep;
        encode_image(img, model, &rep, {LongContourPolicy::Split});
        std::cout << path << " contours " << img.contours.size() << " symbols " << rep.total_symbols << " bits "
                  << rep.total_bits() << " payload_bits_per_symbol " << rep.bits_per_symbol() << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Contour coding with context-tree models"};
    app.require_subcommand(1);

    std::vector<std::string> inputs;
    std::string out, model, mode, csv, dump, lambdas = "0", dmaxes = "1,2,3,4,5";
    std::uint64_t seed = 1;
    TreeFlags tree;
    double lambda = 0.0, dmax = 4.0;
    bool split = false, no_verify = false, dump_tree = false;
    std::size_t markov = 0;
    std::optional<std::uint64_t> suite;

    auto* trace = app.add_subcommand("trace", "Trace PBM masks into contour text");
    trace->add_option("inputs", inputs, "PBM files or directories");
    trace->add_option("-o,--out", out, "Output directory")->required();
    trace->add_option("--synthetic-suite", suite, "Also write the synthetic mask suite for this seed");

    auto* tr = app.add_subcommand("train", "Train a context-tree model");
    tr->add_option("inputs", inputs, "Contour text, PBM files or directories");
    tr->add_option("-o,--out", out, "Model file")->required();
    add_tree_flags(tr, tree);
    tr->add_option("--synthetic-markov", markov, "Append this many symbols from the outline-like Markov source");
    tr->add_option("--seed", seed, "Seed for synthetic data");
    tr->add_option("--dump", dump, "Also write a text dump of the tree");

    auto* enc = app.add_subcommand("encode", "Encode a contour file");
    enc->add_option("--model", model, "Model file")->required();
    std::string enc_in, enc_out;
    enc->add_option("input", enc_in, "Contour text file")->required();
    enc->add_option("-o,--out", enc_out, "Bitstream file")->required();
    enc->add_option("--mode", mode, "Approximate first: ssdd or madd");
    enc->add_option("--lambda", lambda, "Rate weight for ssdd")->check(CLI::NonNegativeNumber);
    enc->add_option("--dmax", dmax, "Search radius, and the distortion bound for madd")->check(CLI::NonNegativeNumber);
    enc->add_flag("--split", split, "Split contours longer than 65535 symbols");

    auto* dec = app.add_subcommand("decode", "Decode a bitstream to contour text");
    dec->add_option("--model", model, "Model file")->required();
    std::string dec_in;
    dec->add_option("input", dec_in, "Bitstream file")->required();
    dec->add_option("-o,--out", enc_out, "Contour text file")->required();
    dec->add_flag("--no-verify", no_verify, "Skip the checksum");

    auto* sweep = app.add_subcommand("rd-sweep", "Rate-distortion sweep to CSV");
    sweep->add_option("--model", model, "Model file")->required();
    sweep->add_option("inputs", inputs, "Contour text, PBM files or directories")->required();
    std::string sweep_mode = "madd";
    sweep->add_option("--mode", sweep_mode, "ssdd or madd");
    sweep->add_option("--lambda", lambdas, "Comma-separated lambda grid (ssdd)");
    sweep->add_option("--dmax", dmaxes, "Comma-separated d_max grid (madd), or the radius for ssdd");
    sweep->add_option("--csv", csv, "Output CSV (default stdout)");
    sweep->add_option("--seed", seed, "Unused; accepted for uniformity");

    auto* st = app.add_subcommand("stats", "Model summary and coding rates");
    st->add_option("--model", model, "Model file")->required();
    st->add_option("inputs", inputs, "Files to measure");
    st->add_flag("--dump", dump_tree, "Print the tree");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*trace) return cmd_trace(inputs, out, suite);
        if (*tr) return cmd_train(inputs, out, tree, markov, seed, dump);
        if (*enc) return cmd_encode(model, enc_in, enc_out, mode, lambda, dmax, split);
        if (*dec) return cmd_decode(model, dec_in, enc_out, no_verify);
        if (*sweep) {
            // For ssdd the dmax option is a single radius.
            double radius = 4.0;
            if (sweep_mode == "ssdd" && sweep->count("--dmax")) radius = parse_grid(dmaxes, "dmax").at(0);
            return cmd_rd_sweep(model, inputs, sweep_mode, lambdas, dmaxes, radius, csv);
        }
        if (*st) return cmd_stats(model, inputs, dump_tree);
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DecodeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
