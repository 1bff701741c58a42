// Command-line front door: run simulations, generate oracle fields, compare
// the two, and list presets. Outputs are plot-ready CSV plus a gnuplot script.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "helmray/oracles.hpp"
#include "helmray/scenario_io.hpp"

namespace fs = std::filesystem;
using namespace helmray;

namespace {

// Resolve --config/--preset plus --set overrides into one scenario. Overrides
// are merged by key into the serialized base document and re-validated.
Scenario resolve_scenario(const std::string& config_path, const std::string& preset_name,
                          const std::vector<std::string>& overrides) {
    std::string base;
    if (!config_path.empty() && !preset_name.empty())
        throw std::invalid_argument("--config and --preset are mutually exclusive");
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw std::runtime_error("cannot read config '" + config_path + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        base = ss.str();
    } else if (!preset_name.empty()) {
        base = "preset = " + preset_name + "\n";
    } else {
        throw std::invalid_argument("one of --config or --preset is required");
    }
    if (overrides.empty()) return load_config(base);

    // apply overrides on the resolved document so they can touch any key,
    // including ones the preset already set
    Scenario resolved = load_config(base);
    std::string doc = serialize(resolved);
    for (const std::string& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("override '" + ov + "' is not key=value");
        const std::string key = ov.substr(0, eq);
        bool replaced = false;
        std::istringstream in(doc);
        std::ostringstream out;
        std::string line;
        while (std::getline(in, line)) {
            if (line.rfind(key + " ", 0) == 0 && line.find('=') != std::string::npos) {
                out << key << " = " << ov.substr(eq + 1) << "\n";
                replaced = true;
            } else {
                out << line << "\n";
            }
        }
        if (!replaced) out << key << " = " << ov.substr(eq + 1) << "\n";
        doc = out.str();
    }
    Scenario s = load_config(doc);
    s.preset_name = resolved.preset_name;
    return s;
}

Samples front_samples(const Wavefront& wf, bool intensity) {
    Samples s;
    s.reserve(wf.size());
    for (const Ray& r : wf.rays) s.emplace_back(r.x, intensity ? r.r * r.r : r.g);
    return s;
}

void write_plot_script(const fs::path& dir) {
    std::ofstream out(dir / "plot.gp");
    out << "# gnuplot script: trajectory fan and initial/final profiles\n"
           "set datafile separator ','\n"
           "set terminal pngcairo size 1400,550\n"
           "set output 'figures.png'\n"
           "set multiplot layout 1,2\n"
           "set xlabel 'z'\n"
           "set ylabel 'x'\n"
           "set title 'Beam trajectories'\n"
           "plot 'trajectories.csv' using 4:3 with dots notitle\n"
           "set xlabel 'x'\n"
           "set ylabel 'intensity / G'\n"
           "set title 'Initial and final transverse profiles'\n"
           "plot 'profiles.csv' using 1:2 with lines title 'I initial', \\\n"
           "     'profiles.csv' using 1:3 with lines dashtype 2 title 'I final', \\\n"
           "     'profiles.csv' using 1:4 with lines title 'G initial', \\\n"
           "     'profiles.csv' using 1:5 with lines dashtype 2 title 'G final'\n"
           "unset multiplot\n";
}

int cmd_run(const std::string& config_path, const std::string& preset_name,
            const std::vector<std::string>& overrides, const fs::path& out_dir) {
    const Scenario s = resolve_scenario(config_path, preset_name, overrides);
    fs::create_directories(out_dir);

    const auto t0 = std::chrono::steady_clock::now();
    TrajectoryRecord rec = run(s.config, s.profile);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    RunBundle bundle{s, {}, 0};
    {
        std::ostringstream traj;
        write_trajectories(rec, traj);
        std::ofstream f(out_dir / "trajectories.csv");
        f << traj.str();
        bundle.trajectory_checksum = fnv1a(traj.str());
        bundle.manifest.push_back("trajectories.csv");
    }
    {
        const Wavefront& first = rec.snapshots.front();
        const Wavefront& last = rec.snapshots.back();
        std::ofstream f(out_dir / "profiles.csv");
        write_profiles(front_samples(first, true), front_samples(last, true),
                       front_samples(first, false), front_samples(last, false), f);
        bundle.manifest.push_back("profiles.csv");
    }
    {
        std::ofstream f(out_dir / "summary.txt");
        write_summary(rec, nullptr, wall, f);
        bundle.manifest.push_back("summary.txt");
    }
    write_plot_script(out_dir);
    bundle.manifest.push_back("plot.gp");
    {
        std::ofstream f(out_dir / "manifest.txt");
        for (const auto& m : bundle.manifest) f << m << "\n";
        f << "trajectory_checksum = " << bundle.trajectory_checksum << "\n";
    }

    std::cout << "steps = " << rec.steps << ", snapshots = " << rec.snapshots.size()
              << ", wall = " << wall << " s\n";
    if (!rec.completed()) {
        std::cerr << "run aborted: " << rec.termination << "\n";
        return 1;
    }
    std::cout << "termination: " << rec.termination << "\n";
    return 0;
}

int cmd_oracle(const std::string& config_path, const std::string& preset_name,
               const std::vector<std::string>& overrides, const fs::path& out_dir) {
    const Scenario s = resolve_scenario(config_path, preset_name, overrides);
    fs::create_directories(out_dir);
    const double zf = s.config.resolved_z_final();
    const FieldGrid f = propagated_field(s.profile, s.config.epsilon, zf, s.config.half_span);
    {
        std::ofstream out(out_dir / "oracle_intensity.csv");
        out << "# epsilon = " << detail::fmt17(s.config.epsilon) << "\n"
            << "# z = " << detail::fmt17(zf) << "\n"
            << "x,intensity\n";
        for (size_t j = 0; j < f.size(); ++j)
            out << detail::fmt17(f.x(j)) << ',' << detail::fmt17(std::norm(f.u[j])) << '\n';
    }
    if (s.profile.is_single_gaussian()) {
        std::ofstream out(out_dir / "oracle_waist.csv");
        out << "z,width\n";
        const int nz = 201;
        for (int i = 0; i < nz; ++i) {
            const double z = zf * i / (nz - 1);
            out << detail::fmt17(z) << ',' << detail::fmt17(waist_trajectory(z, s.config.epsilon))
                << '\n';
        }
    }
    std::cout << "oracle field at z = " << zf << ", grid " << f.size() << " x " << f.dx << "\n";
    return 0;
}

// Read the final recorded front (x, r^2) back from trajectories.csv.
std::vector<std::pair<double, double>> read_final_front(const fs::path& csv,
                                                        double* epsilon_out) {
    std::ifstream in(csv);
    if (!in) throw std::runtime_error("cannot read '" + csv.string() + "'");
    std::string line;
    std::getline(in, line);  // header
    double tmax = -1.0;
    std::vector<std::pair<double, double>> front;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(row, cell, ',')) v.push_back(std::stod(cell));
        if (v.size() != 8) throw std::runtime_error("malformed row in trajectories.csv");
        if (v[1] > tmax) {
            tmax = v[1];
            front.clear();
        }
        if (v[1] == tmax) front.emplace_back(v[2], v[6] * v[6]);
    }
    std::sort(front.begin(), front.end());
    (void)epsilon_out;
    return front;
}

double summary_epsilon(const fs::path& summary) {
    std::ifstream in(summary);
    if (!in) throw std::runtime_error("cannot read '" + summary.string() + "'");
    std::string line;
    while (std::getline(in, line))
        if (line.rfind("config.epsilon = ", 0) == 0) return std::stod(line.substr(17));
    throw std::runtime_error("no config.epsilon in '" + summary.string() + "'");
}

FieldGrid read_oracle_field(const fs::path& csv) {
    std::ifstream in(csv);
    if (!in) throw std::runtime_error("cannot read '" + csv.string() + "'");
    FieldGrid f;
    std::string line;
    std::vector<double> xs;
    while (std::getline(in, line)) {
        if (line.rfind("# epsilon = ", 0) == 0) { f.eps = std::stod(line.substr(12)); continue; }
        if (line.rfind("# z = ", 0) == 0) { f.z = std::stod(line.substr(6)); continue; }
        if (line.empty() || line[0] == '#' || line[0] == 'x') continue;
        const auto comma = line.find(',');
        xs.push_back(std::stod(line.substr(0, comma)));
        f.u.emplace_back(std::sqrt(std::stod(line.substr(comma + 1))), 0.0);
    }
    if (xs.size() < 3) throw std::runtime_error("oracle_intensity.csv too short");
    f.x0 = xs.front();
    f.dx = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
    return f;
}

int cmd_compare(const fs::path& out_dir, double l2_max, double fringe_max) {
    const auto front = read_final_front(out_dir / "trajectories.csv", nullptr);
    const double run_eps = summary_epsilon(out_dir / "summary.txt");
    const FieldGrid field = read_oracle_field(out_dir / "oracle_intensity.csv");
    if (std::abs(field.eps - run_eps) > 1e-15 * std::max(field.eps, run_eps)) {
        std::cerr << "compare refused: run epsilon " << run_eps << " != oracle epsilon "
                  << field.eps << "\n";
        return 2;
    }
    const IntensityMetrics m = compare_intensity(front, field);
    std::cout << "l2_error = " << m.l2_central << "\n"
              << "maxima_rays = " << m.maxima_rays.size() << "\n"
              << "maxima_field = " << m.maxima_field.size() << "\n"
              << "max_fringe_discrepancy = " << m.max_fringe_discrepancy << "\n"
              << "fringe_mismatch = " << (m.fringe_mismatch ? "true" : "false") << "\n";
    {
        std::ofstream f(out_dir / "compare.txt");
        f << "l2_error = " << detail::fmt17(m.l2_central) << "\n"
          << "maxima_rays = " << m.maxima_rays.size() << "\n"
          << "maxima_field = " << m.maxima_field.size() << "\n"
          << "max_fringe_discrepancy = " << detail::fmt17(m.max_fringe_discrepancy) << "\n"
          << "fringe_mismatch = " << (m.fringe_mismatch ? "true" : "false") << "\n";
    }
    const bool pass = m.l2_central <= l2_max && m.max_fringe_discrepancy <= fringe_max &&
                      !m.fringe_mismatch;
    std::cout << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? 0 : 1;
}

int cmd_presets() {
    for (const std::string& name : {"gaussian", "fig2", "fig5", "fig8"}) {
        const Preset p = preset(name);
        std::cout << name << ": " << p.describe << "  (epsilon=" << p.epsilon
                  << ", half_span=" << p.half_span << ")\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"helmray: wave trajectories of monochromatic beams"};
    app.require_subcommand(1);

    std::string config_path, preset_name, out_dir = ".";
    std::vector<std::string> overrides;
    double l2_max = 0.10, fringe_max = 0.10;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "configuration file (key = value lines)");
        sub->add_option("--preset", preset_name, "named preset (gaussian, fig2, fig5, fig8)");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--set", overrides, "override, key=value (repeatable)");
        sub->add_option("overrides", overrides, "positional key=value overrides");
    };
    add_common(app.add_subcommand("run", "integrate the ray system and write artifacts"));
    add_common(app.add_subcommand("oracle", "angular-spectrum field and analytic curves"));
    auto* cmp = app.add_subcommand("compare", "compare a run directory against its oracle");
    cmp->add_option("--out", out_dir, "directory holding run and oracle outputs");
    cmp->add_option("--l2-max", l2_max, "L2 threshold over the central 80%");
    cmp->add_option("--fringe-max", fringe_max, "fringe discrepancy threshold");
    app.add_subcommand("presets", "list named presets and their parameters");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("run")) return cmd_run(config_path, preset_name, overrides, out_dir);
        if (app.got_subcommand("oracle"))
            return cmd_oracle(config_path, preset_name, overrides, out_dir);
        if (app.got_subcommand("compare")) return cmd_compare(out_dir, l2_max, fringe_max);
        if (app.got_subcommand("presets")) return cmd_presets();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
