#include "morphwing/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>

#include "CLI11.hpp"

#include "morphwing/aero.hpp"
#include "morphwing/controller.hpp"
#include "morphwing/crm.hpp"
#include "morphwing/error.hpp"
#include "morphwing/flight_log.hpp"
#include "morphwing/io.hpp"
#include "morphwing/linkage.hpp"
#include "morphwing/units.hpp"

namespace morphwing::cli {

namespace {

namespace fs = std::filesystem;
using io::json;

struct Globals {
    std::string config;
    std::string out;
    std::string format = "json";
};

class Emitter {
public:
    Emitter(const Globals& g, std::ostream& out) : globals_(g), out_(out) {}

    void emit(const std::string& text) const {
        if (globals_.out.empty()) {
            out_ << text;
        } else {
            io::write_atomic(globals_.out, text);
        }
    }
    void emit(const json& j) const { emit(j.dump(2) + "\n"); }

private:
    const Globals& globals_;
    std::ostream& out_;
};

json load_config(const Globals& g) {
    if (g.config.empty()) return json::object();
    return io::read_json(g.config);
}

// Accepts a bare linkage document or a project config with a "linkage" key.
const json& linkage_section(const json& cfg) {
    if (cfg.contains("linkage")) return cfg.at("linkage");
    return cfg;
}

SynthesisOptions synthesis_options() {
    SynthesisOptions opt;
    if (const char* seed = std::getenv("MORPHWING_SEED")) {
        try {
            opt.seed = std::stoull(seed);
        } catch (const std::exception&) {
            throw Error(ErrorKind::InvalidInput, "MORPHWING_SEED must be an unsigned integer");
        }
    }
    return opt;
}

struct Linkage {
    LinkageGiven given;
    LinkageDerived derived;
};

Linkage load_linkage(const json& cfg) {
    const json& section = linkage_section(cfg);
    Linkage l;
    l.given = io::linkage_given_from_json(section);
    l.given.validate();
    if (auto d = io::linkage_derived_from_json(section)) {
        l.derived = *d;
    } else {
        l.derived = synthesize_linkage(l.given, synthesis_options());
    }
    return l;
}

fs::path resolve(const fs::path& base_file, const std::string& file) {
    const fs::path p(file);
    if (p.is_absolute()) return p;
    return base_file.parent_path() / p;
}

double number_or(const json& j, const char* key, double fallback) {
    return j.contains(key) ? j.at(key).get<double>() : fallback;
}

std::string csv_line(std::initializer_list<double> values) {
    std::string s;
    bool first = true;
    for (double v : values) {
        if (!first) s += ',';
        s += io::format_number(v);
        first = false;
    }
    return s + "\n";
}

// ---- subcommands ---------------------------------------------------------------

void cmd_synthesize(const Globals& g, const Emitter& emit) {
    if (g.config.empty()) throw Error(ErrorKind::InvalidInput, "synthesize requires --config");
    const json cfg = load_config(g);
    const LinkageGiven given = io::linkage_given_from_json(linkage_section(cfg));
    const SynthesisResult r = synthesize_linkage_detailed(given, synthesis_options());
    json out = io::to_json(given, r.lengths);
    out["synthesis"] = {{"tucked_theta_s", io::round9(r.tucked_theta_s)},
                        {"max_residual_mm2", io::round9(r.max_residual)},
                        {"start_index", r.start_index}};
    emit.emit(out);
}

struct KinematicsArgs {
    std::vector<double> x_a;
    int sweep = 0;
    double wrist_mount_deg = 0.0;
};

void cmd_kinematics(const Globals& g, const KinematicsArgs& a, const Emitter& emit) {
    if (g.config.empty()) throw Error(ErrorKind::InvalidInput, "kinematics requires --config");
    const Linkage l = load_linkage(load_config(g));
    std::vector<double> xs = a.x_a;
    if (a.sweep > 1) {
        const double lo = std::min(l.given.extended.x_A, l.given.tucked.x_A);
        const double hi = std::max(l.given.extended.x_A, l.given.tucked.x_A);
        for (int k = 0; k < a.sweep; ++k) xs.push_back(lo + (hi - lo) * k / (a.sweep - 1));
    }
    if (xs.empty()) xs = {l.given.extended.x_A, l.given.tucked.x_A};

    const double mount = deg_to_rad(a.wrist_mount_deg);
    if (g.format == "csv") {
        std::string text = "x_A,theta_s_deg,theta_e_deg,theta_w_deg,wingspan_mm\n";
        for (double x : xs) {
            const JointState s = forward_kinematics(l.derived, l.given, x);
            const SkeletonPose p = skeleton_pose(s, 0.0, mount, l.given);
            text += csv_line({x, rad_to_deg(s.theta_s), rad_to_deg(s.theta_e),
                              rad_to_deg(s.theta_w), std::abs(p.wingtip.y())});
        }
        emit.emit(text);
        return;
    }
    const SliderRange range = reachable_range(l.derived, l.given);
    json states = json::array();
    for (double x : xs) {
        const JointState s = forward_kinematics(l.derived, l.given, x);
        json js = io::to_json(s);
        js["wingspan_mm"] = io::round9(std::abs(skeleton_pose(s, 0.0, mount, l.given).wingtip.y()));
        states.push_back(js);
    }
    emit.emit(json{{"reachable_x_A", {io::round9(range.lo), io::round9(range.hi)}},
                   {"states", states}});
}

struct TrajectoryArgs {
    double duration = 0.0;
    int samples_per_cycle = 64;
    std::optional<double> wrist_mount_deg;
    std::string roll_side;
    double roll_at = 0.0;
    std::optional<double> roll_sis;
};

// Piecewise-constant SIS windows; the extended lock elsewhere.
struct SisWindow {
    double start = 0.0;
    double end = 0.0;
    double x_sis = 0.0;
};

SisSchedule schedule_from(std::vector<SisWindow> windows, double lock) {
    if (windows.empty()) return {};
    return [windows = std::move(windows), lock](double t) {
        for (const auto& w : windows) {
            if (t >= w.start && t <= w.end) return w.x_sis;
        }
        return lock;
    };
}

void cmd_trajectory(const Globals& g, const TrajectoryArgs& a, const Emitter& emit) {
    if (g.config.empty()) throw Error(ErrorKind::InvalidInput, "trajectory requires --config");
    const json cfg = load_config(g);
    const Linkage l = load_linkage(cfg);
    const CrmConfig crm = io::crm_from_json(cfg.value("crm", json::object()));

    TrajectoryRequest req;
    req.duration = a.duration > 0.0 ? a.duration : 2.0 * crm.period();
    req.samples_per_cycle = a.samples_per_cycle;
    req.wrist_mount = deg_to_rad(a.wrist_mount_deg.value_or(number_or(cfg, "wrist_mount_deg", 0.0)));

    std::map<Side, std::vector<SisWindow>> windows;
    if (cfg.contains("sis_windows")) {
        for (const auto& w : cfg.at("sis_windows")) {
            windows[io::parse_side(w.at("side").get<std::string>())].push_back(
                {w.at("start").get<double>(), w.at("end").get<double>(), w.at("x_sis").get<double>()});
        }
    }
    if (!a.roll_side.empty()) {
        // Run the controller on the simulated Hall triggers and raise the SIS
        // for the downstroke its pulse covers.
        std::vector<ControllerEvent> events;
        bool roll_sent = false;
        for (double t : hall_trigger_times(crm, req.duration)) {
            if (!roll_sent && t > a.roll_at) {
                events.push_back({a.roll_at, RollCommand{io::parse_side(a.roll_side)}});
                roll_sent = true;
            }
            events.push_back({t, HallTrigger{}});
        }
        const SimulationResult sim = simulate(ControllerConfig{}, events);
        for (const auto& o : sim.outputs) {
            const auto* pulse = std::get_if<ServoPulse>(&o.kind);
            if (!pulse) continue;
            const DownstrokeWindow w = asymmetric_downstroke_window(o, crm.period());
            if (w.downstrokes_overlapped == 0) continue;
            windows[pulse->side].push_back(
                {w.covered_begin, w.covered_end, a.roll_sis.value_or(crm.x_max)});
        }
    }
    req.left_sis = schedule_from(windows[Side::Left], crm.lock());
    req.right_sis = schedule_from(windows[Side::Right], crm.lock());
    emit.emit(io::trajectory_csv(wingbeat_trajectory(crm, l.derived, l.given, req)));
}

struct ControllerArgs {
    std::string events;
    std::optional<double> glide_threshold;
    std::string roll_policy;
};

void cmd_simulate_controller(const Globals& g, const ControllerArgs& a, const Emitter& emit) {
    const json cfg = load_config(g);
    ControllerConfig cc;
    if (cfg.contains("controller")) {
        const json& c = cfg.at("controller");
        cc.glide_threshold = number_or(c, "glide_threshold", cc.glide_threshold);
        if (c.value("roll_policy", "queue") == "drop") cc.roll_policy = RollPolicy::Drop;
    }
    if (a.glide_threshold) cc.glide_threshold = *a.glide_threshold;
    if (a.roll_policy == "drop") cc.roll_policy = RollPolicy::Drop;
    if (a.roll_policy == "queue") cc.roll_policy = RollPolicy::QueueOne;

    const auto events = io::parse_events_csv(io::read_csv(a.events));
    const SimulationResult sim = simulate(cc, events);
    if (g.format == "json") {
        json outs = json::array();
        for (const auto& o : sim.outputs) {
            json j{{"t", io::round9(o.t)}};
            if (const auto* p = std::get_if<ServoPulse>(&o.kind)) {
                j["kind"] = "ServoPulse";
                j["side"] = io::side_name(p->side);
                j["start"] = io::round9(p->start);
                j["duration"] = io::round9(p->duration);
            } else if (std::holds_alternative<MotorStop>(o.kind)) {
                j["kind"] = "MotorStop";
            } else {
                j["kind"] = std::get<ControllerWarning>(o.kind).code;
            }
            outs.push_back(j);
        }
        emit.emit(json{{"outputs", outs}});
        return;
    }
    emit.emit(io::controller_output_csv(sim.outputs));
}

struct ManifestEntry {
    fs::path file;
    double alpha_deg = 0.0;
    double freq_hint_hz = 0.0;
    double g_offset_n = 0.0;
    double wrist_mount_deg = 0.0;
    std::optional<fs::path> tare;
};

std::vector<ManifestEntry> read_manifest(const std::string& path) {
    const json m = io::read_json(path);
    const json& list = m.is_array() ? m : m.at("conditions");
    std::vector<ManifestEntry> out;
    for (const auto& e : list) {
        ManifestEntry me;
        me.file = resolve(path, e.at("file").get<std::string>());
        me.alpha_deg = e.at("alpha_deg").get<double>();
        me.freq_hint_hz = number_or(e, "freq_hint_hz", 0.0);
        me.g_offset_n = number_or(e, "g_offset_n", 0.0);
        me.wrist_mount_deg = number_or(e, "wrist_mount_deg", 0.0);
        if (e.contains("tare_file")) me.tare = resolve(path, e.at("tare_file").get<std::string>());
        out.push_back(me);
    }
    return out;
}

std::vector<SurfacePoint> read_points(const std::string& path) {
    const io::CsvTable t = io::read_csv(path);
    const int ca = t.column("alpha_deg");
    const int cf = t.column("freq_hz");
    const int cv = t.column("value");
    if (ca < 0 || cf < 0 || cv < 0) {
        throw Error(ErrorKind::InvalidInput, path + ": expected columns alpha_deg,freq_hz,value");
    }
    std::vector<SurfacePoint> pts;
    for (const auto& row : t.rows) {
        pts.push_back({io::parse_double(row.at(static_cast<std::size_t>(ca))),
                       io::parse_double(row.at(static_cast<std::size_t>(cf))),
                       io::parse_double(row.at(static_cast<std::size_t>(cv)))});
    }
    return pts;
}

struct FitArgs {
    std::string manifest;
    std::string lift_points;
    std::string thrust_points;
    double wrist_mount_deg = 0.0;
};

void cmd_fit(const FitArgs& a, const Emitter& emit) {
    json surfaces = json::array();
    if (!a.lift_points.empty() || !a.thrust_points.empty()) {
        if (a.lift_points.empty() || a.thrust_points.empty()) {
            throw Error(ErrorKind::InvalidInput, "fit needs both --lift-points and --thrust-points");
        }
        surfaces.push_back({{"wrist_mount_deg", io::round9(a.wrist_mount_deg)},
                            {"lift", io::to_json(fit_surface(read_points(a.lift_points)))},
                            {"thrust", io::to_json(fit_surface(read_points(a.thrust_points)))}});
        emit.emit(json{{"surfaces", surfaces}});
        return;
    }
    if (a.manifest.empty()) {
        throw Error(ErrorKind::InvalidInput, "fit needs --manifest or --lift-points/--thrust-points");
    }

    struct Group {
        std::vector<SurfacePoint> lift, thrust;
    };
    std::map<double, Group> groups;
    json conditions = json::array();
    for (const auto& e : read_manifest(a.manifest)) {
        const ForceRecord rec = io::parse_force_csv(io::read_csv(e.file));
        double tare_x = 0.0;
        double tare_z = 0.0;
        if (e.tare) {
            const ForceRecord tare = io::parse_force_csv(io::read_csv(*e.tare));
            for (const auto& s : tare) {
                tare_x += s.fx;
                tare_z += s.fz;
            }
            if (!tare.empty()) {
                tare_x /= static_cast<double>(tare.size());
                tare_z /= static_cast<double>(tare.size());
            }
        }
        const Segmentation seg = segment_cycles(rec);
        const double alpha = deg_to_rad(e.alpha_deg);
        std::vector<double> lift(rec.size());
        std::vector<double> thrust(rec.size());
        for (std::size_t k = 0; k < rec.size(); ++k) {
            const WindAxes w = to_wind_axes(rec[k].fx - tare_x, rec[k].fz - tare_z, alpha, e.g_offset_n);
            lift[k] = newton_to_gram(w.lift);
            thrust[k] = newton_to_gram(w.net_thrust);
        }
        const CycleStats ls = cycle_average(lift, seg.cycles);
        const CycleStats ts = cycle_average(thrust, seg.cycles);
        const double freq = seg.cycles.empty() ? e.freq_hint_hz : cycle_frequency(rec, seg);
        groups[e.wrist_mount_deg].lift.push_back({e.alpha_deg, freq, ls.mean});
        groups[e.wrist_mount_deg].thrust.push_back({e.alpha_deg, freq, ts.mean});
        conditions.push_back({{"file", e.file.filename().string()},
                              {"alpha_deg", io::round9(e.alpha_deg)},
                              {"freq_hz", io::round9(freq)},
                              {"wrist_mount_deg", io::round9(e.wrist_mount_deg)},
                              {"lift_g", io::to_json(ls)},
                              {"net_thrust_g", io::to_json(ts)},
                              {"rejected_cycles", seg.rejected.size()}});
    }
    for (const auto& [mount, grp] : groups) {
        surfaces.push_back({{"wrist_mount_deg", io::round9(mount)},
                            {"lift", io::to_json(fit_surface(grp.lift))},
                            {"thrust", io::to_json(fit_surface(grp.thrust))}});
    }
    emit.emit(json{{"surfaces", surfaces}, {"conditions", conditions}});
}

struct TrimArgs {
    std::string surfaces;
    std::optional<double> weight_g;
};

json trim_json(const json& entry, double weight) {
    const AeroSurface lift = io::surface_from_json(entry.at("lift"));
    const AeroSurface thrust = io::surface_from_json(entry.at("thrust"));
    const TrimResult r = solve_trim(lift, thrust, weight);
    json j = io::to_json(r.trim);
    if (entry.contains("wrist_mount_deg")) j["wrist_mount_deg"] = entry.at("wrist_mount_deg");
    j["weight_g"] = io::round9(weight);
    json contour = json::array();
    for (const auto& p : r.contour) contour.push_back({io::round9(p.alpha), io::round9(p.freq)});
    j["thrust_zero_contour"] = contour;
    return j;
}

void cmd_trim(const Globals& g, const TrimArgs& a, const Emitter& emit) {
    if (a.surfaces.empty()) throw Error(ErrorKind::InvalidInput, "trim requires --surfaces");
    const json cfg = load_config(g);
    double weight = 600.0;
    if (cfg.contains("pipeline")) weight = number_or(cfg.at("pipeline"), "weight_g", weight);
    if (a.weight_g) weight = *a.weight_g;

    const json doc = io::read_json(a.surfaces);
    if (doc.contains("surfaces")) {
        json trims = json::array();
        for (const auto& entry : doc.at("surfaces")) trims.push_back(trim_json(entry, weight));
        emit.emit(json{{"trims", trims}});
    } else {
        emit.emit(trim_json(doc, weight));
    }
}

struct FilterArgs {
    std::string input;
    std::string column = "mx";
    double cutoff_hz = 12.0;
    int order = 5;
    double sample_rate = 0.0;
};

void cmd_filter(const FilterArgs& a, const Emitter& emit) {
    if (a.input.empty()) throw Error(ErrorKind::InvalidInput, "filter requires --input");
    const io::CsvTable t = io::read_csv(a.input);
    const int ct = t.column("t");
    const int cv = t.column(a.column);
    if (ct < 0 || cv < 0) {
        throw Error(ErrorKind::InvalidInput, a.input + ": needs columns t and " + a.column);
    }
    std::vector<double> time;
    std::vector<double> values;
    for (const auto& row : t.rows) {
        time.push_back(io::parse_double(row.at(static_cast<std::size_t>(ct))));
        values.push_back(io::parse_double(row.at(static_cast<std::size_t>(cv))));
    }
    double fs = a.sample_rate;
    if (fs <= 0.0) {
        if (time.size() < 2) throw Error(ErrorKind::InvalidInput, "need 2 samples to infer the rate");
        fs = static_cast<double>(time.size() - 1) / (time.back() - time.front());
    }
    const auto filtered = butterworth_lowpass(values, fs, a.cutoff_hz, a.order);
    std::string text = "t," + a.column + ",filtered\n";
    for (std::size_t k = 0; k < time.size(); ++k) text += csv_line({time[k], values[k], filtered[k]});
    emit.emit(text);
}

struct RollArgs {
    std::string manifest;
    double cutoff_hz = 12.0;
    int order = 5;
    bool no_filter = false;
    double bound = 0.007;
};

void cmd_roll_moment(const RollArgs& a, const Emitter& emit) {
    if (a.manifest.empty()) throw Error(ErrorKind::InvalidInput, "roll-moment requires --manifest");
    std::vector<RollCondition> conds;
    for (const auto& e : read_manifest(a.manifest)) {
        conds.push_back({e.alpha_deg, e.freq_hint_hz, io::parse_force_csv(io::read_csv(e.file))});
    }
    RollMomentOptions opt;
    opt.filter = !a.no_filter;
    opt.cutoff_hz = a.cutoff_hz;
    opt.order = a.order;
    opt.rmse_bound = a.bound;
    emit.emit(io::to_json(roll_moment_analysis(conds, opt)));
}

struct AgilityArgs {
    std::vector<std::string> logs;
    double target_deg = 90.0;
    double freq_hz = 0.0;
    double t0 = 0.0;
    std::optional<std::size_t> start_marker;
    int bins = 20;
};

void cmd_agility(const Globals& g, const AgilityArgs& a, const Emitter& emit) {
    if (a.logs.empty()) throw Error(ErrorKind::InvalidInput, "agility requires at least one --log");
    io::LogCsvOptions opt;
    opt.marker_freq_hz = a.freq_hz;
    opt.marker_t0 = a.t0;
    opt.maneuver_marker = a.start_marker;

    std::vector<AttitudeLog> logs;
    json trials = json::array();
    for (const auto& path : a.logs) {
        logs.push_back(io::parse_log_csv(io::read_csv(path), opt));
        const auto m = agility_metric(logs.back(), a.target_deg);
        trials.push_back({{"file", fs::path(path).filename().string()},
                          {"wingbeats", m ? json(io::round9(*m)) : json(nullptr)}});
    }
    json out{{"target_deg", io::round9(a.target_deg)}, {"trials", trials}};
    if (logs.size() >= 2) {
        const ManeuverEnsemble ens = ensemble_stats(logs, a.bins);
        if (g.format == "csv") {
            emit.emit(io::ensemble_csv(ens));
            return;
        }
        const auto m = agility_metric(ens, a.target_deg);
        out["ensemble"] = {{"wingbeats", m ? json(io::round9(*m)) : json(nullptr)},
                           {"bins", ens.bins.size()},
                           {"bins_per_wingbeat", ens.bins_per_wingbeat}};
    }
    emit.emit(out);
}

void write_error(std::ostream& err, const std::string& kind, const std::string& message) {
    err << json{{"error", kind}, {"message", message}}.dump() << "\n";
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Morphing-wing mechanism design and wind-tunnel data toolkit", "morphwing"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, "Config JSON");
    app.add_option("--out", g.out, "Output path (default: stdout)");
    app.add_option("--format", g.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));

    auto* synth = app.add_subcommand("synthesize", "Solve link lengths from the design poses");

    KinematicsArgs kin;
    auto* kinematics = app.add_subcommand("kinematics", "Joint angles for slider displacements");
    kinematics->add_option("--x-a", kin.x_a, "Slider displacement(s), mm");
    kinematics->add_option("--sweep", kin.sweep, "Evenly spaced samples between the design poses");
    kinematics->add_option("--wrist-mount-deg", kin.wrist_mount_deg, "Wrist mounting angle");

    TrajectoryArgs traj;
    auto* trajectory = app.add_subcommand("trajectory", "Wingbeat trajectory CSV");
    trajectory->add_option("--duration", traj.duration, "Seconds (default: two wingbeats)");
    trajectory->add_option("--samples-per-cycle", traj.samples_per_cycle)->check(CLI::Range(16, 1 << 20));
    trajectory->add_option("--wrist-mount-deg", traj.wrist_mount_deg);
    trajectory->add_option("--roll-side", traj.roll_side, "Issue a roll command for this side")
        ->check(CLI::IsMember({"left", "right"}));
    trajectory->add_option("--roll-at", traj.roll_at, "Roll command time, s");
    trajectory->add_option("--roll-sis-mm", traj.roll_sis, "SIS position during the asymmetric downstroke");

    ControllerArgs ctl;
    auto* controller = app.add_subcommand("simulate-controller", "Replay controller events");
    controller->add_option("--events", ctl.events, "Event CSV (t,kind,arg)")->required();
    controller->add_option("--glide-threshold", ctl.glide_threshold);
    controller->add_option("--roll-policy", ctl.roll_policy)->check(CLI::IsMember({"queue", "drop"}));

    FitArgs fit;
    auto* fitcmd = app.add_subcommand("fit", "Cycle-average force records and fit quadratic surfaces");
    fitcmd->add_option("--manifest", fit.manifest, "Condition manifest JSON");
    fitcmd->add_option("--lift-points", fit.lift_points, "CSV alpha_deg,freq_hz,value");
    fitcmd->add_option("--thrust-points", fit.thrust_points, "CSV alpha_deg,freq_hz,value");
    fitcmd->add_option("--wrist-mount-deg", fit.wrist_mount_deg);

    TrimArgs tr;
    auto* trim = app.add_subcommand("trim", "Solve the thrust-zero, lift-equals-weight state");
    trim->add_option("--surfaces", tr.surfaces, "Surface JSON written by fit");
    trim->add_option("--weight-g", tr.weight_g, "Vehicle weight, gram-force");

    FilterArgs fa;
    auto* filter = app.add_subcommand("filter", "Causal Butterworth low-pass of one CSV column");
    filter->add_option("--input", fa.input, "CSV with a t column");
    filter->add_option("--column", fa.column);
    filter->add_option("--cutoff-hz", fa.cutoff_hz);
    filter->add_option("--order", fa.order);
    filter->add_option("--sample-rate", fa.sample_rate, "Hz (default: inferred from t)");

    RollArgs ra;
    auto* roll = app.add_subcommand("roll-moment", "Cycle-averaged roll moment and regression");
    roll->add_option("--manifest", ra.manifest, "Condition manifest JSON");
    roll->add_option("--cutoff-hz", ra.cutoff_hz);
    roll->add_option("--order", ra.order);
    roll->add_flag("--no-filter", ra.no_filter);
    roll->add_option("--bound", ra.bound, "Across-cycle RMSE bound, N*m");

    AgilityArgs ag;
    auto* agility = app.add_subcommand("agility", "Wingbeats to reach a roll change");
    agility->add_option("--log", ag.logs, "Attitude log CSV (repeatable)");
    agility->add_option("--target-deg", ag.target_deg);
    agility->add_option("--freq-hz", ag.freq_hz, "Marker frequency when logs have no marker column");
    agility->add_option("--t0", ag.t0, "Maneuver start time for generated markers");
    agility->add_option("--start-marker", ag.start_marker, "Index of the maneuver-start marker");
    agility->add_option("--bins", ag.bins, "Ensemble bins per wingbeat");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n" << app.help();
        return 2;
    }

    const Emitter emit(g, out);
    try {
        if (*synth) cmd_synthesize(g, emit);
        else if (*kinematics) cmd_kinematics(g, kin, emit);
        else if (*trajectory) cmd_trajectory(g, traj, emit);
        else if (*controller) cmd_simulate_controller(g, ctl, emit);
        else if (*fitcmd) cmd_fit(fit, emit);
        else if (*trim) cmd_trim(g, tr, emit);
        else if (*filter) cmd_filter(fa, emit);
        else if (*roll) cmd_roll_moment(ra, emit);
        else if (*agility) cmd_agility(g, ag, emit);
    } catch (const Error& e) {
        write_error(err, to_string(e.kind()), e.what());
        return 1;
    } catch (const json::exception& e) {
        write_error(err, "InvalidInput", e.what());
        return 1;
    }
    return 0;
}

} // namespace morphwing::cli
