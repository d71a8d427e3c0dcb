#include "morphwing/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "morphwing/error.hpp"
#include "morphwing/units.hpp"

namespace morphwing::io {

namespace fs = std::filesystem;

std::string format_number(double value) {
    if (!std::isfinite(value)) {
        if (std::isnan(value)) return "nan";
        return value > 0 ? "inf" : "-inf";
    }
    if (value == 0.0) return "0";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 9);
    return std::string(buf, res.ptr);
}

double round9(double value) {
    if (!std::isfinite(value)) return value;
    const std::string s = format_number(value);
    double out = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), out);
    return out;
}

void write_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::Io, "cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw Error(ErrorKind::Io, "write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorKind::Io, "cannot rename into " + path.string());
    }
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const fs::path& path) {
    try {
        return json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::InvalidInput, path.string() + ": " + e.what());
    }
}

// ---- CSV ---------------------------------------------------------------------

int CsvTable::column(const std::string& name) const {
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (header[k] == name) return static_cast<int>(k);
    }
    return -1;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Comma-separated fields; double quotes protect commas, "" is a literal quote.
std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
        const char ch = line[k];
        if (quoted) {
            if (ch == '"' && k + 1 < line.size() && line[k + 1] == '"') {
                field += '"';
                ++k;
            } else if (ch == '"') {
                quoted = false;
            } else {
                field += ch;
            }
        } else if (ch == '"') {
            quoted = true;
            was_quoted = true;
        } else if (ch == ',') {
            out.push_back(was_quoted ? field : trim(field));
            field.clear();
            was_quoted = false;
        } else {
            field += ch;
        }
    }
    if (quoted) throw Error(ErrorKind::InvalidInput, "unterminated quote in CSV line");
    out.push_back(was_quoted ? field : trim(field));
    return out;
}

int require_column(const CsvTable& t, const std::string& name) {
    const int c = t.column(name);
    if (c < 0) throw Error(ErrorKind::InvalidInput, "CSV is missing column '" + name + "'");
    return c;
}

const std::string& cell(const std::vector<std::string>& row, int col) {
    static const std::string empty;
    return col >= 0 && static_cast<std::size_t>(col) < row.size() ? row[static_cast<std::size_t>(col)]
                                                                   : empty;
}

std::string join(std::initializer_list<std::string> fields) {
    std::string out;
    bool first = true;
    for (const auto& f : fields) {
        if (!first) out += ',';
        out += f;
        first = false;
    }
    return out;
}

} // namespace

CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        const std::string body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        if (!have_header) {
            t.header = split(body);
            have_header = true;
        } else {
            t.rows.push_back(split(body));
        }
    }
    if (!have_header) throw Error(ErrorKind::InvalidInput, "CSV has no header line");
    return t;
}

CsvTable read_csv(const fs::path& path) { return parse_csv(read_text(path)); }

double parse_double(const std::string& field) {
    double v = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    if (begin != end && *begin == '+') ++begin;
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end) {
        throw Error(ErrorKind::InvalidInput, "not a number: '" + field + "'");
    }
    return v;
}

ForceRecord parse_force_csv(const CsvTable& table) {
    const int ct = require_column(table, "t");
    const int cfx = require_column(table, "fx");
    const int cfy = require_column(table, "fy");
    const int cfz = require_column(table, "fz");
    const int cmx = require_column(table, "mx");
    const int cmy = require_column(table, "my");
    const int cmz = require_column(table, "mz");
    const int ch = require_column(table, "hall");
    ForceRecord rec;
    rec.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        ForceSample s;
        s.t = parse_double(cell(row, ct));
        s.fx = parse_double(cell(row, cfx));
        s.fy = parse_double(cell(row, cfy));
        s.fz = parse_double(cell(row, cfz));
        s.mx = parse_double(cell(row, cmx));
        s.my = parse_double(cell(row, cmy));
        s.mz = parse_double(cell(row, cmz));
        s.hall = parse_double(cell(row, ch)) != 0.0;
        rec.push_back(s);
    }
    return rec;
}

std::string force_csv(const ForceRecord& record) {
    std::string out = "t,fx,fy,fz,mx,my,mz,hall\n";
    for (const auto& s : record) {
        out += join({format_number(s.t), format_number(s.fx), format_number(s.fy),
                     format_number(s.fz), format_number(s.mx), format_number(s.my),
                     format_number(s.mz), s.hall ? "1" : "0"});
        out += '\n';
    }
    return out;
}

AttitudeLog parse_log_csv(const CsvTable& table, const LogCsvOptions& options) {
    const int ct = require_column(table, "t");
    const int cr = require_column(table, "roll_deg");
    const int cp = require_column(table, "pitch_deg");
    const int cy = require_column(table, "yaw_deg");
    const int cpr = table.column("p_dps");
    const int cqr = table.column("q_dps");
    const int crr = table.column("r_dps");
    const int cm = table.column("marker");

    AttitudeLog log;
    std::optional<std::size_t> start;
    for (const auto& row : table.rows) {
        AttitudeSample s;
        s.t = parse_double(cell(row, ct));
        s.roll = parse_double(cell(row, cr));
        s.pitch = parse_double(cell(row, cp));
        s.yaw = parse_double(cell(row, cy));
        if (cpr >= 0) s.p = parse_double(cell(row, cpr));
        if (cqr >= 0) s.q = parse_double(cell(row, cqr));
        if (crr >= 0) s.r = parse_double(cell(row, crr));
        log.samples.push_back(s);
        if (cm >= 0 && !cell(row, cm).empty()) {
            const double m = parse_double(cell(row, cm));
            if (m != 0.0) {
                if (m == 2.0 && !start) start = log.markers.size();
                log.markers.push_back(s.t);
            }
        }
    }
    if (cm < 0 && options.marker_freq_hz > 0.0 && !log.samples.empty()) {
        log.markers = markers_from_frequency(options.marker_freq_hz, options.marker_t0,
                                             log.samples.front().t, log.samples.back().t);
        // Start at the marker at (or just after) t0.
        for (std::size_t k = 0; k < log.markers.size(); ++k) {
            if (log.markers[k] >= options.marker_t0 - 1e-12) {
                start = k;
                break;
            }
        }
    }
    log.maneuver_marker = options.maneuver_marker.value_or(start.value_or(0));
    log.validate();
    return log;
}

std::string log_csv(const AttitudeLog& log) {
    std::string out = "t,roll_deg,pitch_deg,yaw_deg,p_dps,q_dps,r_dps,marker\n";
    std::size_t next = 0;
    for (const auto& s : log.samples) {
        std::string marker = "0";
        while (next < log.markers.size() && log.markers[next] < s.t) ++next;
        if (next < log.markers.size() && log.markers[next] == s.t) {
            marker = next == log.maneuver_marker ? "2" : "1";
        }
        out += join({format_number(s.t), format_number(s.roll), format_number(s.pitch),
                     format_number(s.yaw), format_number(s.p), format_number(s.q),
                     format_number(s.r), marker});
        out += '\n';
    }
    return out;
}

std::vector<ControllerEvent> parse_events_csv(const CsvTable& table) {
    const int ct = require_column(table, "t");
    const int ck = require_column(table, "kind");
    const int ca = table.column("arg");
    std::vector<ControllerEvent> events;
    for (const auto& row : table.rows) {
        ControllerEvent e;
        e.t = parse_double(cell(row, ct));
        std::string kind = cell(row, ck);
        for (auto& ch : kind) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        if (kind == "hall" || kind == "halltrigger") {
            e.kind = HallTrigger{};
        } else if (kind == "roll" || kind == "rollcommand") {
            e.kind = RollCommand{parse_side(cell(row, ca))};
        } else if (kind == "throttle" || kind == "throttleset") {
            e.kind = ThrottleSet{parse_double(cell(row, ca))};
        } else {
            throw Error(ErrorKind::InvalidInput, "unknown controller event kind '" + kind + "'");
        }
        events.push_back(e);
    }
    return events;
}

std::string events_csv(const std::vector<ControllerEvent>& events) {
    std::string out = "t,kind,arg\n";
    for (const auto& e : events) {
        out += format_number(e.t);
        if (std::holds_alternative<HallTrigger>(e.kind)) {
            out += ",hall,";
        } else if (const auto* r = std::get_if<RollCommand>(&e.kind)) {
            out += ",roll," + std::string(side_name(r->side));
        } else {
            out += ",throttle," + format_number(std::get<ThrottleSet>(e.kind).value);
        }
        out += '\n';
    }
    return out;
}

std::string controller_output_csv(const std::vector<ControllerOutput>& outputs) {
    std::string out = "t,kind,side,start,duration\n";
    for (const auto& o : outputs) {
        if (const auto* p = std::get_if<ServoPulse>(&o.kind)) {
            out += join({format_number(o.t), "ServoPulse", side_name(p->side),
                         format_number(p->start), format_number(p->duration)});
        } else if (std::holds_alternative<MotorStop>(o.kind)) {
            out += join({format_number(o.t), "MotorStop", "", format_number(o.t), "0"});
        } else {
            const auto& w = std::get<ControllerWarning>(o.kind);
            out += join({format_number(o.t), w.code, w.side ? side_name(*w.side) : "", "", ""});
        }
        out += '\n';
    }
    return out;
}

std::string trajectory_csv(const WingbeatTrajectory& trajectory) {
    std::string out = "t,side,gear_angle_rad,flap_angle_rad,x_mis_mm,x_sis_mm,x_os_mm,wrist_x,"
                      "wrist_y,wrist_z,tip_x,tip_y,tip_z\n";
    auto row = [&](const WingbeatSample& s) {
        out += join({format_number(s.t), side_name(s.side), format_number(s.gear_angle),
                     format_number(s.flap_angle), format_number(s.x_MIS), format_number(s.x_SIS),
                     format_number(s.x_OS), format_number(s.pose.wrist.x()),
                     format_number(s.pose.wrist.y()), format_number(s.pose.wrist.z()),
                     format_number(s.pose.wingtip.x()), format_number(s.pose.wingtip.y()),
                     format_number(s.pose.wingtip.z())});
        out += '\n';
    };
    const std::size_t n = std::max(trajectory.left.size(), trajectory.right.size());
    for (std::size_t k = 0; k < n; ++k) {
        if (k < trajectory.left.size()) row(trajectory.left[k]);
        if (k < trajectory.right.size()) row(trajectory.right[k]);
    }
    return out;
}

std::string ensemble_csv(const ManeuverEnsemble& ensemble) {
    std::string out = "tau,mean_roll,se_roll,mean_pitch,se_pitch,mean_yaw,se_yaw\n";
    for (const auto& b : ensemble.bins) {
        out += join({format_number(b.tau), format_number(b.mean_roll), format_number(b.se_roll),
                     format_number(b.mean_pitch), format_number(b.se_pitch),
                     format_number(b.mean_yaw), format_number(b.se_yaw)});
        out += '\n';
    }
    return out;
}

// ---- JSON ----------------------------------------------------------------------

const char* side_name(Side side) { return side == Side::Left ? "left" : "right"; }

Side parse_side(const std::string& text) {
    std::string s = text;
    for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (s == "left" || s == "l") return Side::Left;
    if (s == "right" || s == "r") return Side::Right;
    throw Error(ErrorKind::InvalidInput, "side must be 'left' or 'right', got '" + text + "'");
}

namespace {

double number(const json& j, const char* key) {
    if (!j.contains(key)) throw Error(ErrorKind::InvalidInput, std::string("missing key '") + key + "'");
    if (!j.at(key).is_number()) {
        throw Error(ErrorKind::InvalidInput, std::string("key '") + key + "' must be a number");
    }
    return j.at(key).get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
    return j.contains(key) ? number(j, key) : fallback;
}

} // namespace

json to_json(const PoseConstraint& pose) {
    json j;
    if (pose.theta_s) j["theta_s"] = round9(*pose.theta_s);
    j["theta_e"] = round9(pose.theta_e);
    j["theta_w"] = round9(pose.theta_w);
    j["x_A"] = round9(pose.x_A);
    return j;
}

json to_json(const LinkageGiven& g) {
    return json{{"l_h", round9(g.l_h)}, {"l_r", round9(g.l_r)}, {"l_m", round9(g.l_m)},
                {"b", round9(g.b)},     {"f", round9(g.f)},     {"extended", to_json(g.extended)},
                {"tucked", to_json(g.tucked)}};
}

json to_json(const LinkageDerived& d) {
    return json{{"a", round9(d.a)}, {"c", round9(d.c)}, {"d", round9(d.d)}, {"e", round9(d.e)},
                {"g", round9(d.g)}, {"h", round9(d.h)}, {"i", round9(d.i)}, {"j", round9(d.j)}};
}

json to_json(const LinkageGiven& given, const LinkageDerived& derived) {
    json j = to_json(given);
    j["derived"] = to_json(derived);
    return j;
}

json to_json(const JointState& s) {
    return json{{"x_A", round9(s.x_A)},
                {"theta_s", round9(rad_to_deg(s.theta_s))},
                {"theta_e", round9(rad_to_deg(s.theta_e))},
                {"theta_w", round9(rad_to_deg(s.theta_w))}};
}

json to_json(const AeroSurface& s) {
    return json{{"z0", round9(s.z0)},           {"a", round9(s.a)},
                {"b", round9(s.b)},             {"c", round9(s.c)},
                {"d", round9(s.d)},             {"f", round9(s.f)},
                {"r_value", round9(s.r_value)}, {"rmse_g", round9(s.rmse)},
                {"n_points", s.n_points}};
}

json to_json(const TrimPoint& t) {
    return json{{"alpha_star_deg", round9(t.alpha_star)},
                {"freq_star_hz", round9(t.freq_star)},
                {"lift_at_trim_g", round9(t.lift_at_trim)},
                {"thrust_at_trim_g", round9(t.thrust_at_trim)}};
}

json to_json(const CycleStats& s) {
    return json{{"mean", round9(s.mean)},
                {"rmse_across_cycles", round9(s.rmse_across_cycles)},
                {"n_cycles", s.n_cycles}};
}

json to_json(const RollMomentReport& r) {
    json conditions = json::array();
    for (const auto& c : r.conditions) {
        conditions.push_back({{"alpha_deg", round9(c.alpha_deg)},
                              {"freq_hz", round9(c.freq_hz)},
                              {"roll_moment_nm", to_json(c.stats)},
                              {"within_bound", c.within_bound}});
    }
    json regressions = json::array();
    for (const auto& g : r.regressions) {
        regressions.push_back({{"alpha_deg", round9(g.alpha_deg)},
                               {"slope_nm_per_hz", round9(g.slope)},
                               {"intercept_nm", round9(g.intercept)},
                               {"r_squared", round9(g.r_squared)},
                               {"n_points", g.n_points}});
    }
    return json{{"conditions", conditions},
                {"regressions", regressions},
                {"all_within_bound", r.all_within_bound}};
}

json to_json(const CrmConfig& c) {
    json j{{"R", round9(c.R)},
           {"H", round9(c.H)},
           {"gear_rate", round9(c.gear_rate)},
           {"mis_travel", json::array({round9(c.x_min), round9(c.x_max)})},
           {"gear_phase", round9(c.gear_phase)},
           {"mean_flap", round9(c.mean_flap)}};
    if (c.extended_lock) j["extended_lock"] = round9(*c.extended_lock);
    return j;
}

PoseConstraint pose_from_json(const json& j) {
    PoseConstraint p;
    if (j.contains("theta_s")) p.theta_s = number(j, "theta_s");
    p.theta_e = number(j, "theta_e");
    p.theta_w = number(j, "theta_w");
    p.x_A = number(j, "x_A");
    return p;
}

LinkageGiven linkage_given_from_json(const json& j) {
    LinkageGiven g;
    g.l_h = number(j, "l_h");
    g.l_r = number(j, "l_r");
    g.l_m = number(j, "l_m");
    g.b = number(j, "b");
    g.f = number(j, "f");
    if (!j.contains("extended") || !j.contains("tucked")) {
        throw Error(ErrorKind::InvalidInput, "linkage needs 'extended' and 'tucked' poses");
    }
    g.extended = pose_from_json(j.at("extended"));
    g.tucked = pose_from_json(j.at("tucked"));
    return g;
}

std::optional<LinkageDerived> linkage_derived_from_json(const json& j) {
    if (!j.contains("derived")) return std::nullopt;
    const json& d = j.at("derived");
    LinkageDerived out;
    out.a = number(d, "a");
    out.c = number(d, "c");
    out.d = number(d, "d");
    out.e = number(d, "e");
    out.g = number(d, "g");
    out.h = number(d, "h");
    out.i = number(d, "i");
    out.j = number(d, "j");
    return out;
}

AeroSurface surface_from_json(const json& j) {
    AeroSurface s;
    s.z0 = number(j, "z0");
    s.a = number(j, "a");
    s.b = number(j, "b");
    s.c = number(j, "c");
    s.d = number(j, "d");
    s.f = number(j, "f");
    s.r_value = number_or(j, "r_value", 0.0);
    s.rmse = number_or(j, "rmse_g", 0.0);
    s.n_points = static_cast<int>(number_or(j, "n_points", 0.0));
    return s;
}

CrmConfig crm_from_json(const json& j) {
    CrmConfig c;
    c.R = number_or(j, "R", c.R);
    c.H = number_or(j, "H", c.H);
    c.gear_rate = number_or(j, "gear_rate", c.gear_rate);
    if (j.contains("mis_travel")) {
        const json& t = j.at("mis_travel");
        if (!t.is_array() || t.size() != 2) {
            throw Error(ErrorKind::InvalidInput, "mis_travel must be [x_min, x_max]");
        }
        c.x_min = t.at(0).get<double>();
        c.x_max = t.at(1).get<double>();
    }
    if (j.contains("extended_lock")) c.extended_lock = number(j, "extended_lock");
    c.gear_phase = number_or(j, "gear_phase", c.gear_phase);
    c.mean_flap = number_or(j, "mean_flap", c.mean_flap);
    c.validate();
    return c;
}

} // namespace morphwing::io
