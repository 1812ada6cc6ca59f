// Copyright 2026 The signmask Authors
// SPDX-License-Identifier: Apache-2.0

#include "signmask/cli.hpp"

#include "signmask/config.hpp"
#include "signmask/error.hpp"
#include "signmask/geometry.hpp"
#include "signmask/heatmap.hpp"
#include "signmask/ingest.hpp"
#include "signmask/io.hpp"
#include "signmask/maskgen.hpp"
#include "signmask/maskplan_io.hpp"
#include "signmask/rng.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace signmask::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct JobOptions {
    std::string config_path;
    std::string manifest;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::string streams;
    int jobs = 1;
    bool strict = false;
};

/// A failure that should surface as exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

PipelineConfig resolve_config(const JobOptions& options)
{
    std::string path = options.config_path;
    if (path.empty()) {
        if (const char* env = std::getenv("SIGNMASK_CONFIG"); env != nullptr && *env != '\0') {
            path = env;
        }
    }
    PipelineConfig config = path.empty() ? PipelineConfig{} : load_config(path);
    if (options.seed) {
        config.seed = *options.seed;
    }
    return config;
}

std::vector<Stream> resolve_streams(const std::string& text)
{
    if (text.empty()) {
        return {kAllStreams.begin(), kAllStreams.end()};
    }
    std::vector<Stream> streams;
    std::stringstream in(text);
    std::string name;
    while (std::getline(in, name, ',')) {
        const auto stream = parse_stream(name);
        if (!stream) {
            throw UsageError("unknown stream '" + name + "' (expected video-tube, video-st, keypoint-st)");
        }
        if (std::find(streams.begin(), streams.end(), *stream) == streams.end()) {
            streams.push_back(*stream);
        }
    }
    if (streams.empty()) {
        throw UsageError("--streams selects nothing");
    }
    return streams;
}

std::vector<ManifestEntry> load_manifest_or_usage(const JobOptions& options)
{
    if (options.manifest.empty()) {
        throw UsageError("--manifest is required");
    }
    std::vector<ManifestEntry> entries;
    try {
        entries = read_manifest(options.manifest);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    if (entries.empty()) {
        throw UsageError("manifest " + options.manifest + " lists no clips");
    }
    return entries;
}

fs::path prepare_out_dir(const JobOptions& options)
{
    if (options.out.empty()) {
        throw UsageError("--out is required");
    }
    std::error_code ec;
    fs::create_directories(options.out, ec);
    if (ec || !fs::is_directory(options.out)) {
        throw UsageError("cannot create output directory " + options.out);
    }
    return options.out;
}

/// Per-clip seed, identical for serial and parallel runs.
std::uint64_t clip_seed(std::uint64_t seed, const std::string& clip_id)
{
    return seed ^ fnv1a64(clip_id);
}

struct LoadedClip {
    ClipBundle bundle;
    std::vector<std::optional<BoundingBox>> boxes;
};

LoadedClip load_clip(const ManifestEntry& entry, const LabelMap& labels)
{
    MetaDocument doc = parse_meta_document(read_text_file(entry.meta));
    if (doc.meta.clip_id != entry.clip_id) {
        throw Error(ErrorCode::SchemaViolation,
                    "meta clip_id '" + doc.meta.clip_id + "' differs from manifest '" + entry.clip_id + "'");
    }
    PipelineConfig parse_config;
    parse_config.label_map = labels;
    LoadedClip clip;
    clip.bundle = parse_clip(read_text_file(entry.keypoints), read_binary_file(entry.segments), doc.meta, parse_config);
    clip.boxes = std::move(doc.boxes);
    return clip;
}

/// Bundles written by `preprocess` carry engine class codes already.
ClipBundle load_bundle(const ManifestEntry& entry)
{
    try {
        return load_clip(entry, identity_label_map()).bundle;
    } catch (const Error& e) {
        throw Error(ErrorCode::MissingBundle, "clip '" + entry.clip_id + "': " + e.what());
    }
}

json error_record(const std::string& clip_id, const std::exception& e)
{
    json record = {{"clip_id", clip_id}, {"status", "error"}, {"message", e.what()}};
    if (const auto* error = dynamic_cast<const Error*>(&e)) {
        record["error"] = std::string(error_code_name(error->code()));
    }
    return record;
}

std::string jsonl(const std::vector<json>& records)
{
    std::string text;
    for (const auto& record : records) {
        text += record.dump();
        text += '\n';
    }
    return text;
}

int finish(const std::vector<json>& records, bool strict, std::ostream& err)
{
    std::size_t failures = 0;
    for (const auto& record : records) {
        if (record.value("status", "") == "error") {
            ++failures;
            err << "clip '" << record.value("clip_id", "") << "' failed: " << record.value("message", "") << '\n';
        }
    }
    return failures > 0 && strict ? kClipFailure : kSuccess;
}

// ---------------------------------------------------------------- preprocess

json preprocess_clip(const ManifestEntry& entry, const PipelineConfig& config, const fs::path& out_dir,
                     ManifestEntry& bundle_entry)
{
    LoadedClip clip = load_clip(entry, config.label_map);
    const ClipMeta& raw = clip.bundle.meta;

    std::vector<std::optional<BoundingBox>> boxes = clip.boxes;
    if (boxes.empty()) {
        boxes.assign(static_cast<std::size_t>(raw.frame_count),
                     BoundingBox{0.0, 0.0, static_cast<double>(raw.width), static_cast<double>(raw.height)});
    }
    const CropTransform transform = crop_to_signer(boxes, raw, config.crop_size);
    ClipBundle bundle = apply_crop(clip.bundle, transform);
    const int frames_in = bundle.meta.kept_frames().size();
    if (bundle.meta.trim_range) {
        bundle = apply_trim(bundle);
    }

    const TrimResult trim = find_trim(bundle.keypoints, config);
    FrameRange kept{trim.front, bundle.meta.frame_count - trim.back};
    int parity_trim = 0;
    if (kept.size() % 2 != 0) {
        --kept.end;
        parity_trim = 1;
    }
    if (kept.size() < 2) {
        throw Error(ErrorCode::EmptyClip, "clip '" + entry.clip_id + "' keeps fewer than 2 frames after trimming");
    }
    bundle.meta.trim_range = kept;
    bundle = apply_trim(bundle);
    validate_tube_layout(bundle.meta);

    const double diagonal = std::hypot(static_cast<double>(bundle.meta.width), static_cast<double>(bundle.meta.height));
    const Handedness handedness = classify_handedness(bundle.keypoints, diagonal, config);

    const fs::path clip_dir = out_dir / entry.clip_id;
    fs::create_directories(clip_dir);
    bundle_entry.clip_id = entry.clip_id;
    bundle_entry.keypoints = clip_dir / "keypoints.jsonl";
    bundle_entry.segments = clip_dir / "segments.sgmt";
    bundle_entry.meta = clip_dir / "meta.json";
    bundle_entry.frames = std::nullopt;
    write_file_atomic(bundle_entry.keypoints, serialize_keypoint_document(bundle.keypoints));
    write_file_atomic(bundle_entry.segments, serialize_segment_document(bundle.segments));
    write_file_atomic(bundle_entry.meta, serialize_meta_document(MetaDocument{bundle.meta, {}}));

    return {
        {"clip_id", entry.clip_id},
        {"status", "ok"},
        {"frames_in", frames_in},
        {"frames_out", bundle.meta.frame_count},
        {"front_trim", trim.front},
        {"back_trim", trim.back},
        {"parity_trim", parity_trim},
        {"handedness", std::string(handedness_name(handedness))},
        {"crop", {{"offset_x", transform.offset_x}, {"offset_y", transform.offset_y}, {"scale", transform.scale}}},
    };
}

int cmd_preprocess(const JobOptions& options, std::ostream& out, std::ostream& err)
{
    const PipelineConfig config = resolve_config(options);
    const auto entries = load_manifest_or_usage(options);
    const fs::path out_dir = prepare_out_dir(options);

    std::vector<json> records(entries.size());
    std::vector<std::optional<ManifestEntry>> bundles(entries.size());
    parallel_for(entries.size(), options.jobs, [&](std::size_t i) {
        try {
            ManifestEntry bundle_entry;
            records[i] = preprocess_clip(entries[i], config, out_dir, bundle_entry);
            bundles[i] = std::move(bundle_entry);
        } catch (const std::exception& e) {
            records[i] = error_record(entries[i].clip_id, e);
        }
    });

    std::vector<ManifestEntry> written;
    for (auto& bundle : bundles) {
        if (bundle) {
            written.push_back(std::move(*bundle));
        }
    }
    write_manifest(out_dir / "manifest.jsonl", written);
    write_file_atomic(out_dir / "preprocess_report.jsonl", jsonl(records));
    out << "preprocessed " << written.size() << " of " << entries.size() << " clips into " << out_dir.string() << '\n';
    return finish(records, options.strict, err);
}

// ------------------------------------------------------------------- genmask

int cmd_genmask(const JobOptions& options, std::ostream& out, std::ostream& err)
{
    const PipelineConfig config = resolve_config(options);
    const auto streams = resolve_streams(options.streams);
    const auto entries = load_manifest_or_usage(options);
    const fs::path out_dir = prepare_out_dir(options);

    const auto started = std::chrono::steady_clock::now();
    std::vector<json> records(entries.size());
    parallel_for(entries.size(), options.jobs, [&](std::size_t i) {
        const ManifestEntry& entry = entries[i];
        try {
            const ClipBundle bundle = load_bundle(entry);
            const PreparedClip clip = prepare_clip(bundle, config);
            const auto plans = generate(clip, config, clip_seed(config.seed, entry.clip_id), streams);
            json plan_records = json::array();
            for (std::size_t k = 0; k < plans.size(); ++k) {
                const MaskPlan& plan = plans[k];
                const std::string name = entry.clip_id + "." + std::string(stream_name(streams[k])) + ".smsk";
                write_file_atomic(out_dir / name, encode_plan(plan));
                plan_records.push_back({
                    {"stream", std::string(stream_name(streams[k]))},
                    {"file", name},
                    {"strategy", std::string(strategy_name(plan.strategy))},
                    {"branch", std::string(branch_name(plan.branch))},
                    {"masked", plan.masked.size()},
                    {"decoder_targets", plan.decoder_targets.size()},
                    {"tokens", plan.grid.size()},
                });
            }
            records[i] = {{"clip_id", entry.clip_id},
                          {"status", "ok"},
                          {"handedness", std::string(handedness_name(clip.handedness))},
                          {"plans", std::move(plan_records)}};
        } catch (const std::exception& e) {
            records[i] = error_record(entry.clip_id, e);
        }
    });
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    const auto failed = static_cast<std::size_t>(std::count_if(
        records.begin(), records.end(), [](const json& r) { return r.value("status", "") == "error"; }));
    write_file_atomic(out_dir / "genmask_report.jsonl", jsonl(records));
    const json summary = {{"clips", entries.size()},
                          {"failed", failed},
                          {"jobs", options.jobs},
                          {"elapsed_seconds", elapsed}};
    write_file_atomic(out_dir / "genmask_summary.json", summary.dump(2) + "\n");
    out << "generated plans for " << entries.size() - failed << " of " << entries.size() << " clips in "
        << std::fixed << std::setprecision(3) << elapsed << " s\n";
    return finish(records, options.strict, err);
}

// ------------------------------------------------------------------- heatmap

int cmd_heatmap(const JobOptions& options, std::ostream& out, std::ostream& err)
{
    const PipelineConfig config = resolve_config(options);
    const auto entries = load_manifest_or_usage(options);
    const fs::path out_dir = prepare_out_dir(options);

    std::vector<json> records(entries.size());
    parallel_for(entries.size(), options.jobs, [&](std::size_t i) {
        const ManifestEntry& entry = entries[i];
        try {
            ClipBundle bundle = load_bundle(entry);
            if (bundle.meta.trim_range) {
                bundle = apply_trim(bundle);
            }
            const HeatmapClip clip = render_clip(bundle.keypoints, config);
            const std::string name = entry.clip_id + ".shmp";
            write_file_atomic(out_dir / name, encode_heatmaps(clip));
            records[i] = {{"clip_id", entry.clip_id}, {"status", "ok"}, {"file", name}, {"maps", clip.maps.size()}};
        } catch (const std::exception& e) {
            records[i] = error_record(entry.clip_id, e);
        }
    });
    out << "rendered heatmaps for " << entries.size() << " clips\n";
    return finish(records, options.strict, err);
}

// ----------------------------------------------------------------- visualize

void write_ppm(const fs::path& path, int height, int width, const std::vector<std::uint8_t>& rgb)
{
    std::string header = "P6\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    std::vector<std::uint8_t> bytes(header.begin(), header.end());
    bytes.insert(bytes.end(), rgb.begin(), rgb.end());
    write_file_atomic(path, bytes);
}

int cmd_visualize(const JobOptions& options, const std::string& clip_id, const std::string& stream_text,
                  const std::string& plans_dir, const std::string& frames_path, std::ostream& out)
{
    const auto entries = load_manifest_or_usage(options);
    const fs::path out_dir = prepare_out_dir(options);
    const auto stream = parse_stream(stream_text);
    if (!stream) {
        throw UsageError("unknown stream '" + stream_text + "'");
    }
    const auto it = std::find_if(entries.begin(), entries.end(),
                                 [&](const ManifestEntry& e) { return e.clip_id == clip_id; });
    if (it == entries.end()) {
        throw UsageError("clip '" + clip_id + "' is not in the manifest");
    }

    ClipBundle bundle = load_bundle(*it);
    if (bundle.meta.trim_range) {
        bundle = apply_trim(bundle);
    }
    const fs::path plan_path =
        fs::path(plans_dir.empty() ? options.out : plans_dir) / (clip_id + "." + stream_text + ".smsk");
    const MaskPlan plan = decode_plan(read_binary_file(plan_path));

    fs::path dump = frames_path;
    if (dump.empty() && it->frames) {
        dump = *it->frames;
    }
    const int height = bundle.meta.height;
    const int width = bundle.meta.width;
    const std::size_t frame_bytes = static_cast<std::size_t>(height) * width * 3;
    const std::size_t frame_count = static_cast<std::size_t>(bundle.meta.frame_count);
    std::vector<std::uint8_t> pixels;
    try {
        pixels = read_binary_file(dump);
    } catch (const Error&) {
        throw Error(ErrorCode::MissingFrames, "no frame dump for clip '" + clip_id + "'");
    }
    if (dump.empty() || pixels.size() < frame_bytes * frame_count) {
        throw Error(ErrorCode::MissingFrames, "frame dump for clip '" + clip_id + "' holds fewer than " +
                                                  std::to_string(frame_count) + " RGB frames");
    }
    if (plan.grid.frames * 2 != bundle.meta.frame_count || plan.grid.rows * 16 != height ||
        plan.grid.cols * 16 != width) {
        throw Error(ErrorCode::DimensionMismatch, "plan grid does not match clip '" + clip_id + "'");
    }

    for (std::size_t f = 0; f < frame_count; ++f) {
        std::vector<std::uint8_t> rgb(pixels.begin() + static_cast<std::ptrdiff_t>(f * frame_bytes),
                                      pixels.begin() + static_cast<std::ptrdiff_t>((f + 1) * frame_bytes));
        const int t = static_cast<int>(f) / 2;
        for (int r = 0; r < plan.grid.rows; ++r) {
            for (int c = 0; c < plan.grid.cols; ++c) {
                const TokenIndex index = plan.grid.index(t, r, c);
                if (!plan.masked.contains(index)) {
                    continue;
                }
                const bool target = plan.decoder_targets.contains(index);
                for (int y = r * 16; y < r * 16 + 16; ++y) {
                    for (int x = c * 16; x < c * 16 + 16; ++x) {
                        std::uint8_t* px = rgb.data() + (static_cast<std::size_t>(y) * width + x) * 3;
                        const bool edge = y == r * 16 || y == r * 16 + 15 || x == c * 16 || x == c * 16 + 15;
                        if (target && edge) {
                            px[0] = 255;
                            px[1] = 255;
                            px[2] = 0;
                        } else {
                            px[0] = static_cast<std::uint8_t>((px[0] + 255) / 2);
                            px[1] = static_cast<std::uint8_t>(px[1] / 2);
                            px[2] = static_cast<std::uint8_t>(px[2] / 2);
                        }
                    }
                }
            }
        }
        std::ostringstream name;
        name << clip_id << '.' << stream_text << '.' << std::setw(4) << std::setfill('0') << f << ".ppm";
        write_ppm(out_dir / name.str(), height, width, rgb);
    }
    out << "wrote " << frame_count << " overlay frames for " << clip_id << '\n';
    return kSuccess;
}

// --------------------------------------------------------------------- stats

int cmd_stats(const JobOptions& options, const std::string& plans_dir, std::ostream& out, std::ostream& err)
{
    const PipelineConfig config = resolve_config(options);
    const auto streams = resolve_streams(options.streams);
    const auto entries = load_manifest_or_usage(options);
    const fs::path plan_root = plans_dir.empty() ? fs::path(options.out) : fs::path(plans_dir);
    if (plan_root.empty()) {
        throw UsageError("stats needs --plans (or --out) pointing at the SMSK directory");
    }

    struct Row {
        std::string clip_id;
        std::string stream;
        std::string strategy;
        std::size_t masked = 0;
        std::size_t tokens = 0;
        double ratio = 0.0;
    };
    std::vector<std::vector<Row>> rows(entries.size());
    std::vector<std::optional<Handedness>> handedness(entries.size());
    const auto started = std::chrono::steady_clock::now();
    parallel_for(entries.size(), options.jobs, [&](std::size_t i) {
        const ManifestEntry& entry = entries[i];
        try {
            handedness[i] = prepare_clip(load_bundle(entry), config).handedness;
        } catch (const std::exception& e) {
            err << "clip '" << entry.clip_id << "': " << e.what() << '\n';
        }
        for (Stream stream : streams) {
            const fs::path path = plan_root / (entry.clip_id + "." + std::string(stream_name(stream)) + ".smsk");
            if (!fs::exists(path)) {
                continue;
            }
            const MaskPlan plan = decode_plan(read_binary_file(path));
            rows[i].push_back({entry.clip_id, std::string(stream_name(stream)), std::string(strategy_name(plan.strategy)),
                               plan.masked.size(), plan.grid.size(), plan.achieved_ratio()});
        }
    });
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    out << std::left << std::setw(24) << "clip_id" << std::setw(13) << "stream" << std::setw(12) << "strategy"
        << std::right << std::setw(8) << "masked" << std::setw(8) << "tokens" << std::setw(10) << "ratio" << '\n';
    std::vector<double> ratios;
    for (const auto& clip_rows : rows) {
        for (const Row& row : clip_rows) {
            out << std::left << std::setw(24) << row.clip_id << std::setw(13) << row.stream << std::setw(12)
                << row.strategy << std::right << std::setw(8) << row.masked << std::setw(8) << row.tokens
                << std::setw(10) << std::fixed << std::setprecision(4) << row.ratio << '\n';
            ratios.push_back(row.ratio);
        }
    }

    out << "\nplans: " << ratios.size() << '\n';
    if (!ratios.empty()) {
        const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
        double mean = 0.0;
        for (double r : ratios) {
            mean += r;
        }
        mean /= static_cast<double>(ratios.size());
        out << std::fixed << std::setprecision(4) << "achieved ratio: min " << *lo << "  mean " << mean << "  max "
            << *hi << '\n';
    }

    std::map<std::string, int> counts;
    for (const auto& h : handedness) {
        if (h) {
            ++counts[std::string(handedness_name(*h))];
        }
    }
    out << "handedness:";
    for (Handedness h : {Handedness::TwoHanded, Handedness::OneHandedLeft, Handedness::OneHandedRight,
                         Handedness::NoHands}) {
        out << ' ' << handedness_name(h) << '=' << counts[std::string(handedness_name(h))];
    }
    out << '\n';

    // Trim lengths come from the preprocess report next to the manifest, when present.
    const fs::path report = fs::path(options.manifest).parent_path() / "preprocess_report.jsonl";
    if (fs::exists(report)) {
        std::istringstream in(read_text_file(report));
        std::string line;
        double front = 0.0;
        double back = 0.0;
        int clips = 0;
        while (std::getline(in, line)) {
            if (line.empty()) {
                continue;
            }
            const json record = json::parse(line, nullptr, false);
            if (record.is_object() && record.value("status", "") == "ok") {
                front += record.value("front_trim", 0);
                back += record.value("back_trim", 0);
                ++clips;
            }
        }
        if (clips > 0) {
            out << std::fixed << std::setprecision(2) << "mean trim: front " << front / clips << "  back "
                << back / clips << '\n';
        }
    } else {
        out << "mean trim: n/a (no preprocess_report.jsonl beside the manifest)\n";
    }

    const double throughput = static_cast<double>(entries.size()) / std::max(elapsed, 1e-9);
    out << std::fixed << std::setprecision(1) << "throughput: " << throughput << " clips/s\n";
    return kSuccess;
}

void add_job_options(CLI::App& command, JobOptions& options, bool with_out = true)
{
    command.add_option("--config", options.config_path, "key=value config file (fallback: $SIGNMASK_CONFIG)");
    command.add_option("--manifest", options.manifest, "line-delimited clip manifest")->required();
    if (with_out) {
        command.add_option("--out", options.out, "output directory")->required();
    }
    command.add_option("--seed", options.seed, "base seed (overrides the config)");
    command.add_option("--jobs", options.jobs, "worker threads")->check(CLI::Range(1, 1024));
    command.add_flag("--strict", options.strict, "exit 1 when any clip fails");
}

}  // namespace

std::vector<ManifestEntry> read_manifest(const fs::path& path)
{
    const std::string text = read_text_file(path);
    const fs::path base = path.parent_path();
    std::vector<ManifestEntry> entries;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const json record = json::parse(line, nullptr, false);
        if (!record.is_object()) {
            throw Error(ErrorCode::SchemaViolation, "manifest line " + std::to_string(line_no) + " is not a JSON object");
        }
        try {
            ManifestEntry entry;
            entry.clip_id = record.at("clip_id").get<std::string>();
            if (entry.clip_id.empty() || entry.clip_id.find_first_of("/\\") != std::string::npos ||
                entry.clip_id == "." || entry.clip_id == "..") {
                throw Error(ErrorCode::SchemaViolation, "clip_id '" + entry.clip_id + "' is not a plain file name");
            }
            entry.keypoints = base / record.at("keypoints").get<std::string>();
            entry.segments = base / record.at("segments").get<std::string>();
            entry.meta = base / record.at("meta").get<std::string>();
            if (record.contains("frames") && record["frames"].is_string()) {
                entry.frames = base / record["frames"].get<std::string>();
            }
            entries.push_back(std::move(entry));
        } catch (const json::exception& e) {
            throw Error(ErrorCode::SchemaViolation, "manifest line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return entries;
}

void write_manifest(const fs::path& path, const std::vector<ManifestEntry>& entries)
{
    const fs::path base = path.parent_path();
    auto relative = [&](const fs::path& p) { return p.lexically_relative(base).generic_string(); };
    std::string text;
    for (const auto& entry : entries) {
        json record = {{"clip_id", entry.clip_id},
                       {"keypoints", relative(entry.keypoints)},
                       {"segments", relative(entry.segments)},
                       {"meta", relative(entry.meta)}};
        if (entry.frames) {
            record["frames"] = relative(*entry.frames);
        }
        text += record.dump();
        text += '\n';
    }
    write_file_atomic(path, text);
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& task)
{
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            task(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                task(i);
            }
        });
    }
    for (auto& thread : threads) {
        thread.join();
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"signmask: segmentation-guided mask plans for masked video pretraining"};
    app.require_subcommand(1);

    JobOptions options;
    std::string clip_id;
    std::string stream;
    std::string plans_dir;
    std::string frames_path;

    auto* preprocess = app.add_subcommand("preprocess", "crop, trim and classify raw clips into bundles");
    add_job_options(*preprocess, options);

    auto* genmask = app.add_subcommand("genmask", "write SMSK mask plans for preprocessed bundles");
    add_job_options(*genmask, options);
    genmask->add_option("--streams", options.streams, "comma list of video-tube,video-st,keypoint-st");

    auto* heatmap = app.add_subcommand("heatmap", "render SHMP keypoint heatmap dumps");
    add_job_options(*heatmap, options);

    auto* visualize = app.add_subcommand("visualize", "overlay a mask plan on raw RGB frames");
    add_job_options(*visualize, options);
    visualize->add_option("--clip", clip_id, "clip id")->required();
    visualize->add_option("--stream", stream, "stream name")->default_val("video-st");
    visualize->add_option("--plans", plans_dir, "directory holding SMSK files (default: --out)");
    visualize->add_option("--frames", frames_path, "raw RGB8 frame dump (default: manifest 'frames')");

    auto* stats = app.add_subcommand("stats", "summarize a mask plan corpus");
    add_job_options(*stats, options, false);
    stats->add_option("--plans", plans_dir, "directory holding SMSK files")->required();
    stats->add_option("--streams", options.streams, "comma list of streams to include");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& arg : args) {
        argv.push_back(arg.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsage;
    }

    try {
        if (preprocess->parsed()) {
            return cmd_preprocess(options, out, err);
        }
        if (genmask->parsed()) {
            return cmd_genmask(options, out, err);
        }
        if (heatmap->parsed()) {
            return cmd_heatmap(options, out, err);
        }
        if (visualize->parsed()) {
            return cmd_visualize(options, clip_id, stream, plans_dir, frames_path, out);
        }
        if (stats->parsed()) {
            return cmd_stats(options, plans_dir, out, err);
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::SchemaViolation) {
            // Bad configuration or flags.
            err << "usage error: " << e.what() << '\n';
            return kUsage;
        }
        err << "error: " << e.what() << '\n';
        return kClipFailure;
    }
    return kUsage;
}

}  // namespace signmask::cli
