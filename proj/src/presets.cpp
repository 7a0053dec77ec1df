#include "cavbec/presets.hpp"

#include "cavbec/error.hpp"

namespace cavbec {

namespace {

constexpr int kGridPoints = 4001;

std::string number_tag(double v) {
    // 30 -> "30", 0.5 -> "0p5"
    std::string s = format_number(v);
    for (auto& c : s) {
        if (c == '.') c = 'p';
    }
    return s;
}

Scenario spectrum_scenario(const PhysicalParams& lab, SpectrumKind kind, Grid grid, std::string stem) {
    Scenario s;
    s.task = Task::Spectrum;
    s.physical = lab;
    s.spectrum_kind = kind;
    s.grid = grid;
    s.basename = std::move(stem);
    return s;
}

Scenario sweep_scenario(Task task, std::string stem) {
    Scenario s;
    s.task = task;
    s.physical = collision_lab(0.0);
    s.sweep = SweepSpec{0.0, 120.0, 121};
    s.basename = std::move(stem);
    return s;
}

FigurePreset fig2(const std::string& name, double kappa) {
    FigurePreset p;
    p.name = name;
    p.description = "phase-noise spectrum vs omega/omega_m, omega_sw = 50 omega_R, kappa = " + number_tag(kappa) +
                    " omega_R, eta = 81 omega_R, gamma = 1e-3 kappa, delta_c in {1, 2, 3} omega_m";
    for (double k : {1.0, 2.0, 3.0}) {
        p.curves.push_back({"delta_c = " + number_tag(k) + " omega_m",
                            spectrum_scenario(detuning_lab(50.0, kappa, k), SpectrumKind::PhaseNoise,
                                              Grid::symmetric(4.0, kGridPoints, GridUnit::Mechanical),
                                              name + "_dc" + number_tag(k) + "wm")});
    }
    p.expected = {
        "four peaks per curve, at +-omega_- (mechanical-like) and +-omega_+ (optical-like)",
        "the splitting between the two positive-frequency peaks grows with delta_c",
        "the lower peak approaches omega_m from below as delta_c grows",
    };
    return p;
}

FigurePreset fig3(const std::string& name, double sw_a, double sw_b, double half_width) {
    FigurePreset p;
    p.name = name;
    p.description = "phase-noise spectrum vs omega/kappa at Delta_c = 0.994 Delta_0, omega_sw in {" +
                    number_tag(sw_a) + ", " + number_tag(sw_b) + "} omega_R";
    for (double sw : {sw_a, sw_b}) {
        p.curves.push_back({"omega_sw = " + number_tag(sw) + " omega_R",
                            spectrum_scenario(collision_lab(sw), SpectrumKind::PhaseNoise,
                                              Grid::symmetric(half_width, kGridPoints, GridUnit::Kappa),
                                              name + "_sw" + number_tag(sw))});
    }
    p.expected = {
        "two peaks per half axis (mechanical and optical modes)",
        "the two peaks move closer together as omega_sw grows",
    };
    return p;
}

FigurePreset fig6(const std::string& name, double sw) {
    FigurePreset p;
    p.name = name;
    p.description = "optimal squeezing and intensity spectra vs omega/omega_m, omega_sw = " + number_tag(sw) +
                    " omega_R, delta_c = omega_m, kappa = 74 omega_R";
    const double kappa = 74.0;
    const Grid grid = Grid::symmetric(3.0, kGridPoints, GridUnit::Mechanical);
    p.curves.push_back({"S_opt", spectrum_scenario(detuning_lab(sw, kappa, 1.0), SpectrumKind::SqueezeOptimal,
                                                   grid, name + "_sopt")});
    p.curves.push_back({"S_I", spectrum_scenario(detuning_lab(sw, kappa, 1.0), SpectrumKind::Intensity, grid,
                                                 name + "_si")});
    p.expected = {
        "S_opt dips below the coherent level 1 around |omega| = omega_m",
        "S_I peaks a little below omega_m; across fig6a/b/c the peak approaches omega_m",
    };
    p.notes = {"kappa fixed at 74 omega_R; a kappa of 74 omega_m would disagree with every other preset"};
    return p;
}

}  // namespace

PhysicalParams collision_lab(double swave) {
    PhysicalParams lab = CalibrationProtocol::collision_study().lab;
    lab.swave = SwaveDirect{Frequency::recoil(swave)};
    return lab;
}

PhysicalParams detuning_lab(double swave, double kappa, double detuning_over_mechanical) {
    PhysicalParams lab = collision_lab(swave);
    lab.cavity_decay = Frequency::recoil(kappa);
    lab.detuning = StarkDetuning{Frequency::recoil(detuning_over_mechanical * mechanical_frequency(swave))};
    return lab;
}

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"fig2a", "fig2b", "fig3a", "fig3b", "fig4a",
                                                   "fig4b", "fig5",  "fig6a", "fig6b", "fig6c"};
    return names;
}

FigurePreset figure_preset(std::string_view name) {
    if (name == "fig2a") return fig2("fig2a", 74.0);
    if (name == "fig2b") return fig2("fig2b", 24.0);
    if (name == "fig3a") return fig3("fig3a", 0.0, 1.0, 15.0);
    if (name == "fig3b") return fig3("fig3b", 30.0, 60.0, 10.0);
    if (name == "fig4a") {
        FigurePreset p;
        p.name = "fig4a";
        p.description = "delta_c/omega_m and Delta_d/omega_m vs omega_sw in [0, 120] omega_R at Delta_c = 0.994 Delta_0";
        p.curves.push_back({"working point sweep", sweep_scenario(Task::StabilitySweep, "fig4a_sweep")});
        p.expected = {
            "omega_m ~ 4 omega_R and |Delta_d| ~ 250 omega_R at omega_sw -> 0",
            "|Delta_d| decreases and omega_m increases with omega_sw",
            "Delta_d -> -omega_m while delta_c -> +omega_m at large omega_sw",
            "stable over the whole range",
        };
        return p;
    }
    if (name == "fig4b") {
        FigurePreset p;
        p.name = "fig4b";
        p.description = "numeric and analytic splitting (units of kappa) and omega_m vs omega_sw in [0, 120] omega_R";
        p.curves.push_back({"splitting curve", sweep_scenario(Task::Calibration, "fig4b_curve")});
        p.expected = {
            "splitting decreases monotonically with omega_sw (one-to-one map)",
            "about 5.6, 4.2 and 2.1 kappa at omega_sw = 30, 60, 120 omega_R",
            "analytic and numeric splittings nearly coincide",
        };
        return p;
    }
    if (name == "fig5") {
        FigurePreset p;
        p.name = "fig5";
        p.description = "intensity spectrum vs omega/kappa at Delta_c = 0.994 Delta_0, omega_sw in {30, 60, 120} omega_R";
        for (double sw : {30.0, 60.0, 120.0}) {
            p.curves.push_back({"omega_sw = " + number_tag(sw) + " omega_R",
                                spectrum_scenario(collision_lab(sw), SpectrumKind::Intensity,
                                                  Grid::symmetric(10.0, kGridPoints, GridUnit::Kappa),
                                                  "fig5_sw" + number_tag(sw))});
        }
        p.expected = {
            "side peaks are small next to the central ones at omega_sw = 30 and 60 omega_R",
            "side-to-central peak ratio is largest at omega_sw = 120 omega_R",
        };
        return p;
    }
    if (name == "fig6a") return fig6("fig6a", 40.0);
    if (name == "fig6b") return fig6("fig6b", 50.0);
    if (name == "fig6c") return fig6("fig6c", 80.0);
    fail(ErrorKind::UnknownPreset, "unknown preset '" + std::string(name) + "'", "preset");
}

}  // namespace cavbec
