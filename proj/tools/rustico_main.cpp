// rustico — trainable curvilinear-structure delineation with push-pull
// inhibition. Subcommands: configure (build a filter from a bar prototype),
// apply (multi-orientation response maps), eval (threshold sweep + metrics).
//
// Exit codes: 0 success, 1 usage, 2 parameter/configuration error,
// 3 I/O error, 4 evaluation error.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rustico/cosfire.hpp"
#include "rustico/datasets.hpp"
#include "rustico/errors.hpp"
#include "rustico/image_io.hpp"
#include "rustico/metrics.hpp"
#include "rustico/run_config.hpp"
#include "rustico/rustico.hpp"
#include "rustico/version.hpp"
#include "parallel.hpp"

namespace fs = std::filesystem;
using namespace rustico;

namespace {

std::uint64_t fnv1a_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot hash missing file: " + path.string());
    std::uint64_t h = 1469598103934665603ull;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void write_text_file(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open for writing: " + path.string());
    out << text;
    if (!out)
        throw IoError("write failed: " + path.string());
}

std::string format_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

DistanceMetric distance_from(const std::string& name) {
    return name == "chebyshev" ? DistanceMetric::chebyshev : DistanceMetric::euclidean;
}

// ---------------------------------------------------------------- configure

GrayImage default_prototype(const RunConfig& cfg) {
    int length = 2 * static_cast<int>(std::ceil(cfg.op.rho_max)) + 1;
    length = std::max(length, cfg.op.prototype_width + 2);
    if (length % 2 == 0)
        ++length;
    const int margin = static_cast<int>(std::ceil(3.0 * cfg.op.sigma)) + 2;
    const int canvas = length + 2 * margin; // odd + even = odd
    return render_bar_prototype(length, cfg.op.prototype_width, canvas);
}

CosfireFilter configure_from(const RunConfig& cfg) {
    const GrayImage proto = default_prototype(cfg);
    const DoGSpec spec{cfg.op.polarity, cfg.op.sigma};
    ConfigureParams params;
    params.sigma0 = cfg.op.sigma0;
    params.alpha = cfg.op.alpha;
    return configure(proto, spec, cfg.radii(), cfg.op.fraction, params);
}

int cmd_configure(const std::string& config_path, std::string filter_path) {
    const RunConfig cfg = load_config(config_path);
    if (filter_path.empty())
        filter_path = (fs::path(cfg.output) / "filter.json").string();

    const auto start = std::chrono::steady_clock::now();
    const CosfireFilter f = configure_from(cfg);
    fs::create_directories(fs::path(filter_path).parent_path().empty()
                               ? fs::path(".")
                               : fs::path(filter_path).parent_path());
    save_filter(f, filter_path);
    const auto elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);

    std::cerr << "configured " << f.tuples.size() << " tuples (sigma0=" << f.sigma0
              << ", alpha=" << f.alpha << ") in " << elapsed.count() << " ms\n";
    std::cerr << "  #  delta    sigma      rho      phi\n";
    for (std::size_t i = 0; i < f.tuples.size(); ++i) {
        const Tuple4& t = f.tuples[i];
        std::cerr << "  " << i << "  " << (t.delta > 0 ? "+1" : "-1") << "  " << t.sigma
                  << "  " << t.rho << "  " << t.phi << "\n";
    }
    std::cerr << "filter written to " << filter_path << "\n";
    return 0;
}

// -------------------------------------------------------------------- apply

struct ApplyRecord {
    std::string id;
    std::string input_hash;
    double response_max = 0.0;
    std::string error;
};

int cmd_apply(const std::string& config_path, std::string filter_path, std::string out_dir,
              std::optional<double> threshold, int jobs) {
    const RunConfig cfg = load_config(config_path);
    if (out_dir.empty())
        out_dir = cfg.output;
    if (filter_path.empty())
        filter_path = (fs::path(cfg.output) / "filter.json").string();

    const CosfireFilter f = load_filter(filter_path);
    const RusticoOperator op =
        make_operator(f, cfg.op.lambda, cfg.op.xi, orientation_set(cfg.op.orientations));

    const ScanResult scan = scan_dataset(cfg.dataset.root, layout_from_string(cfg.dataset.layout));
    for (const std::string& e : scan.errors)
        std::cerr << "scan: " << e << "\n";
    if (scan.items.empty())
        throw IoError("no dataset items under " + cfg.dataset.root);

    const Channel channel = channel_from_string(cfg.dataset.channel);
    const fs::path responses_dir = fs::path(out_dir) / "responses";
    const fs::path masks_dir = fs::path(out_dir) / "masks";
    fs::create_directories(responses_dir);
    if (threshold)
        fs::create_directories(masks_dir);

    const auto start = std::chrono::steady_clock::now();
    std::vector<ApplyRecord> records(scan.items.size());
    detail::parallel_for(scan.items.size(), jobs, [&](std::size_t i) {
        const DatasetEntry& entry = scan.items[i];
        ApplyRecord& rec = records[i];
        rec.id = entry.id;
        try {
            const DatasetItem item = load_item(entry, channel, cfg.dataset.invert);
            rec.input_hash = hex64(fnv1a_file(entry.image));

            GrayImage resp = multi_orientation_response(op, item.image, 1);
            if (item.fov) {
                for (std::size_t p = 0; p < resp.size(); ++p)
                    if (!item.fov->bits[p])
                        resp.data[p] = 0.0;
            }
            double mx = 0.0;
            for (double v : resp.data)
                mx = std::max(mx, v);
            rec.response_max = mx;

            const GrayImage norm = normalize_max(resp);
            write_pgm16(norm, (responses_dir / (entry.id + ".pgm")).string());
            write_png_unit(norm, (responses_dir / (entry.id + ".png")).string());
            if (threshold) {
                const BinaryMask mask = threshold_map(norm, *threshold);
                write_png_mask(mask, (masks_dir / (entry.id + ".png")).string());
            }
        } catch (const std::exception& e) {
            rec.error = e.what();
        }
    });
    const auto elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);

    nlohmann::json sidecar;
    sidecar["version"] = kVersion;
    sidecar["command"] = "apply";
    sidecar["config"] = nlohmann::json::parse(config_to_json(cfg));
    sidecar["filter"] = {{"path", filter_path}, {"hash", hex64(fnv1a_file(filter_path))}};
    if (threshold)
        sidecar["threshold"] = *threshold;
    nlohmann::json images = nlohmann::json::array();
    int failures = 0;
    for (const ApplyRecord& rec : records) {
        if (!rec.error.empty()) {
            ++failures;
            images.push_back({{"id", rec.id}, {"error", rec.error}});
            std::cerr << "apply: " << rec.id << ": " << rec.error << "\n";
        } else {
            images.push_back({{"id", rec.id},
                              {"input_hash", rec.input_hash},
                              {"response_max", rec.response_max}});
        }
    }
    sidecar["images"] = images;
    write_text_file(fs::path(out_dir) / "run.json", sidecar.dump(2) + "\n");

    std::cerr << "processed " << (records.size() - failures) << "/" << records.size()
              << " images in " << elapsed.count() << " ms -> " << responses_dir.string() << "\n";
    if (failures > 0) {
        std::cerr << failures << " image(s) failed\n";
        return 3;
    }
    return 0;
}

// --------------------------------------------------------------------- eval

struct EvalInputs {
    std::vector<std::string> ids;
    std::vector<GrayImage> responses;
    std::vector<BinaryMask> gts;
    std::vector<BinaryMask> fovs; // empty masks when absent
    bool has_fov = false;
};

EvalInputs gather_eval_inputs(const RunConfig& cfg, const fs::path& responses_dir) {
    const ScanResult scan = scan_dataset(cfg.dataset.root, layout_from_string(cfg.dataset.layout));
    std::map<std::string, const DatasetEntry*> by_id;
    for (const DatasetEntry& e : scan.items)
        by_id[e.id] = &e;

    std::vector<fs::path> files;
    if (fs::is_directory(responses_dir))
        for (const auto& de : fs::directory_iterator(responses_dir))
            if (de.is_regular_file() && de.path().extension() == ".pgm")
                files.push_back(de.path());
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw EvalError("no response maps (*.pgm) under " + responses_dir.string());

    std::vector<std::string> missing_gt;
    EvalInputs in;
    const bool want_centerline = cfg.eval.metric_set == "prf";
    for (const fs::path& file : files) {
        const std::string id = file.stem().string();
        auto it = by_id.find(id);
        if (it == by_id.end()) {
            missing_gt.push_back(id);
            continue;
        }
        const DatasetEntry& entry = *it->second;
        const fs::path gt_path = want_centerline
                                     ? (!entry.centerline.empty() ? entry.centerline
                                                                  : entry.segmentation)
                                     : (!entry.segmentation.empty() ? entry.segmentation
                                                                    : entry.centerline);
        if (gt_path.empty()) {
            missing_gt.push_back(id);
            continue;
        }
        in.ids.push_back(id);
        in.responses.push_back(load_image(file.string()));
        in.gts.push_back(load_mask(gt_path.string()));
        if (!entry.fov.empty()) {
            in.fovs.push_back(load_mask(entry.fov.string()));
            in.has_fov = true;
        } else {
            in.fovs.emplace_back();
        }
        if (in.responses.back().width != in.gts.back().width ||
            in.responses.back().height != in.gts.back().height)
            throw EvalError(id + ": response/ground-truth dimensions differ");
    }
    if (!missing_gt.empty()) {
        std::string msg = "no ground truth matched for:";
        for (const std::string& id : missing_gt)
            msg += " " + id;
        throw EvalError(msg);
    }
    return in;
}

std::map<std::string, double> read_metric_column(const fs::path& csv, const std::string& column) {
    std::ifstream in(csv);
    if (!in)
        throw IoError("cannot open baseline CSV: " + csv.string());
    std::string line;
    if (!std::getline(in, line))
        throw IoError("empty baseline CSV: " + csv.string());
    std::vector<std::string> header;
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ','))
        header.push_back(cell);
    const auto col_it = std::find(header.begin(), header.end(), column);
    if (col_it == header.end())
        throw EvalError("baseline CSV lacks column '" + column + "': " + csv.string());
    const std::size_t col = static_cast<std::size_t>(col_it - header.begin());

    std::map<std::string, double> out;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::stringstream ls(line);
        std::vector<std::string> cells;
        while (std::getline(ls, cell, ','))
            cells.push_back(cell);
        if (cells.size() <= col)
            throw IoError("short row in baseline CSV: " + csv.string());
        out[cells[0]] = std::stod(cells[col]);
    }
    return out;
}

double baseline_p_value(const fs::path& csv, const std::string& column,
                        const std::vector<std::string>& ids,
                        const std::vector<double>& current) {
    const std::map<std::string, double> base = read_metric_column(csv, column);
    std::vector<double> a, b;
    std::vector<std::string> missing;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        auto it = base.find(ids[i]);
        if (it == base.end()) {
            missing.push_back(ids[i]);
            continue;
        }
        a.push_back(current[i]);
        b.push_back(it->second);
    }
    if (!missing.empty()) {
        std::string msg = "baseline CSV misses ids:";
        for (const std::string& id : missing)
            msg += " " + id;
        throw EvalError(msg);
    }
    return wilcoxon_signed_rank(a, b);
}

int cmd_eval(const std::string& config_path, std::string responses_dir_flag,
             std::string out_dir, const std::string& baseline_csv) {
    const RunConfig cfg = load_config(config_path);
    if (out_dir.empty())
        out_dir = cfg.output;
    const fs::path responses_dir =
        responses_dir_flag.empty() ? fs::path(cfg.output) / "responses" : fs::path(responses_dir_flag);

    const EvalInputs in = gather_eval_inputs(cfg, responses_dir);
    std::vector<const GrayImage*> resp_ptrs;
    std::vector<const BinaryMask*> gt_ptrs;
    std::vector<const BinaryMask*> fov_ptrs;
    for (std::size_t i = 0; i < in.ids.size(); ++i) {
        resp_ptrs.push_back(&in.responses[i]);
        gt_ptrs.push_back(&in.gts[i]);
        fov_ptrs.push_back(in.fovs[i].size() > 0 ? &in.fovs[i] : nullptr);
    }

    nlohmann::json summary;
    summary["version"] = kVersion;
    summary["command"] = "eval";
    summary["config"] = nlohmann::json::parse(config_to_json(cfg));
    summary["n_images"] = in.ids.size();

    std::ostringstream csv, sweep_csv;
    if (cfg.eval.metric_set == "prf") {
        const SweepResult sweep = sweep_thresholds(resp_ptrs, gt_ptrs, cfg.eval.d_star,
                                                   distance_from(cfg.eval.distance));
        csv << "id,precision,recall,f\n";
        std::vector<double> f_scores;
        for (std::size_t i = 0; i < in.ids.size(); ++i) {
            const Prf& s = sweep.per_image[i];
            csv << in.ids[i] << ',' << format_num(s.precision) << ',' << format_num(s.recall)
                << ',' << format_num(s.f) << "\n";
            f_scores.push_back(s.f);
        }
        sweep_csv << "t,avg_precision,avg_recall,avg_f\n";
        for (const auto& pt : sweep.curve)
            sweep_csv << format_num(pt[0]) << ',' << format_num(pt[1]) << ','
                      << format_num(pt[2]) << ',' << format_num(pt[3]) << "\n";
        summary["t_star"] = sweep.t_star;
        summary["averages"] = {{"precision", sweep.avg_precision},
                               {"recall", sweep.avg_recall},
                               {"f", sweep.avg_f}};
        if (!baseline_csv.empty())
            summary["p_value"] = baseline_p_value(baseline_csv, "f", in.ids, f_scores);
        std::cerr << "t* = " << sweep.t_star << ", avg F = " << sweep.avg_f << "\n";
    } else {
        const CalSweep cs = sweep_cal(resp_ptrs, gt_ptrs, fov_ptrs);
        const MccSweep ms = sweep_mcc(resp_ptrs, gt_ptrs, fov_ptrs);
        csv << "id,mcc,c,a,l,cal\n";
        std::vector<double> cal_scores;
        for (std::size_t i = 0; i < in.ids.size(); ++i) {
            const CalResult& r = cs.per_image[i];
            csv << in.ids[i] << ',' << format_num(ms.per_image[i]) << ',' << format_num(r.c)
                << ',' << format_num(r.a) << ',' << format_num(r.l) << ','
                << format_num(r.cal) << "\n";
            cal_scores.push_back(r.cal);
        }
        sweep_csv << "t,avg_mcc,avg_cal\n";
        for (std::size_t k = 0; k < cs.curve.size(); ++k)
            sweep_csv << format_num(cs.curve[k][0]) << ',' << format_num(ms.curve[k][1])
                      << ',' << format_num(cs.curve[k][1]) << "\n";
        summary["t_star_cal"] = cs.t_star;
        summary["t_star_mcc"] = ms.t_star;
        summary["averages"] = {{"mcc", ms.avg_mcc},
                               {"c", cs.averages.c},
                               {"a", cs.averages.a},
                               {"l", cs.averages.l},
                               {"cal", cs.averages.cal}};
        if (!baseline_csv.empty())
            summary["p_value"] = baseline_p_value(baseline_csv, "cal", in.ids, cal_scores);
        std::cerr << "t*(CAL) = " << cs.t_star << ", avg CAL = " << cs.averages.cal
                  << ", t*(MCC) = " << ms.t_star << ", avg MCC = " << ms.avg_mcc << "\n";
    }
    if (!baseline_csv.empty())
        summary["baseline"] = baseline_csv;

    write_text_file(fs::path(out_dir) / "metrics.csv", csv.str());
    write_text_file(fs::path(out_dir) / "sweep.csv", sweep_csv.str());
    write_text_file(fs::path(out_dir) / "summary.json", summary.dump(2) + "\n");
    std::cerr << "reports written to " << out_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"trainable curvilinear-structure delineation with push-pull inhibition"};
    app.set_version_flag("--version", std::string("rustico ") + kVersion);
    app.require_subcommand(1);

    std::string config_path, filter_path, out_dir, responses_dir, baseline_csv;
    std::optional<double> threshold;
    int jobs = 0;

    CLI::App* c_configure =
        app.add_subcommand("configure", "build a filter from the synthetic bar prototype");
    c_configure->add_option("--config", config_path, "run configuration JSON")->required();
    c_configure->add_option("--filter", filter_path, "output filter path (default <output>/filter.json)");

    CLI::App* c_apply = app.add_subcommand("apply", "compute response maps for a dataset");
    c_apply->add_option("--config", config_path, "run configuration JSON")->required();
    c_apply->add_option("--filter", filter_path, "filter JSON (default <output>/filter.json)");
    c_apply->add_option("--out", out_dir, "output directory (default from config)");
    c_apply->add_option("--threshold", threshold, "also write binary masks at this threshold");
    c_apply->add_option("--jobs", jobs, "worker threads (default RUSTICO_JOBS or all cores)");

    CLI::App* c_eval = app.add_subcommand("eval", "threshold sweep and metric reports");
    c_eval->add_option("--config", config_path, "run configuration JSON")->required();
    c_eval->add_option("--responses", responses_dir, "response map directory (default <output>/responses)");
    c_eval->add_option("--out", out_dir, "report directory (default from config)");
    c_eval->add_option("--baseline", baseline_csv, "metrics.csv of a baseline run for the paired test");
    c_eval->add_option("--jobs", jobs, "worker threads (default RUSTICO_JOBS or all cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (jobs > 0) {
            // worker-pool default seen by every parallel section downstream
            setenv("RUSTICO_JOBS", std::to_string(jobs).c_str(), 1);
        }
        if (c_configure->parsed())
            return cmd_configure(config_path, filter_path);
        if (c_apply->parsed())
            return cmd_apply(config_path, filter_path, out_dir, threshold, jobs);
        if (c_eval->parsed())
            return cmd_eval(config_path, responses_dir, out_dir, baseline_csv);
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 3;
    } catch (const EvalError& e) {
        std::cerr << "evaluation error: " << e.what() << "\n";
        return 4;
    } catch (const ConfigureError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
