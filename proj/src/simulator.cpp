#include "seebench/simulator.hpp"

#include "seebench/errors.hpp"
#include "seebench/io/digest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace seebench::sim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Earliest representable instant at which now - ref > timeout holds.
double watchdog_deadline(double ref, double timeout) {
    double t = ref + timeout;
    while (watchdog_check(t, ref, timeout) == WatchdogAction::None) {
        t = std::nextafter(t, kInf);
    }
    return t;
}

enum class Firmware { Running, Blocked, Booting, Unpowered };

enum class Scheduled {
    PhaseBoundary,
    WindowEnd,
    WindowStart,
    Damage,
    Break,
    FwStrike,
    SelStrike,
    SoftStrike,
    ScintCount,
};

struct Item {
    double t;
    Scheduled kind;
    double value;  // segment/window index or scintillator count
};

class CampaignRunner {
public:
    CampaignRunner(const CampaignConfig& config, const RunOptions& options)
        : cfg_(config),
          opts_(options),
          fw_rng_(config.seed, streams::kFwBlock),
          sel_rng_(config.seed, streams::kSel),
          soft_rng_(config.seed, streams::kSoftReset),
          hazard_rng_(config.seed, streams::kHazard),
          scint_rng_(config.seed, streams::kScintillator),
          noise_rng_(config.seed, streams::kNoise),
          eeprom_rng_(config.seed, streams::kEeprom) {}

    CampaignResult run();

private:
    void schedule();
    void advance_to(double t);
    double watchdog_fire_time() const;
    double noiseless_sum_a() const;
    void handle(const Item& item);
    void sample(double t);
    void hard_reset(double t);
    void start_boot(double t);
    void finish_boot(double t);
    void power_restore(double t);
    void log(double t, EventKind kind, double payload = 0.0) { result_.events.append(t, kind, payload); }

    const CampaignConfig& cfg_;
    const RunOptions& opts_;
    RngStream fw_rng_, sel_rng_, soft_rng_, hazard_rng_, scint_rng_, noise_rng_, eeprom_rng_;

    CampaignResult result_;
    std::vector<Item> agenda_;
    std::size_t adc_index_ = 0;
    std::size_t hall_index_ = 0;
    double channel_noise_ma_ = 0.0;

    // State.
    double now_ = 0.0;
    std::size_t segment_ = 0;
    double fluence_ = 0.0;
    Health health_ = Health::Fine;
    Firmware firmware_ = Firmware::Booting;
    bool block_pending_ = false;
    bool power_on_ = true;
    bool armed_ = false;
    TimeWindow window_{};
    double watchdog_ref_ = 0.0;
    double last_heartbeat_ = 0.0;
    double boot_done_at_ = kInf;
    double power_restore_at_ = kInf;
    double latched_a_ = 0.0;
    bool eeprom_corrupted_ = false;
    std::vector<double> last_currents_;
};

void CampaignRunner::schedule() {
    const auto& tl = result_.timeline;
    const auto& beam = cfg_.beam;
    const double total = cfg_.total_duration;
    const double bg = beam.background_flux.value();

    for (std::size_t i = 1; i < tl.segments.size(); ++i) {
        agenda_.push_back({tl.segments[i].start, Scheduled::PhaseBoundary, static_cast<double>(i)});
    }
    for (std::size_t i = 0; i < result_.test_windows.size(); ++i) {
        agenda_.push_back({result_.test_windows[i].start, Scheduled::WindowStart, static_cast<double>(i)});
        agenda_.push_back({result_.test_windows[i].end, Scheduled::WindowEnd, static_cast<double>(i)});
    }

    const double fw_rate = cfg_.dut.fw_sigma(beam.species) * beam.nominal_flux;
    const double sel_rate = cfg_.dut.sel_sigma(beam.species) * beam.nominal_flux;
    const double area = beam.spot.area_cm2();
    for (const auto& seg : tl.segments) {
        if (seg.phase == Phase::Gpio) {
            for (double t : draw_event_times(fw_rate, seg.start, seg.end, fw_rng_)) {
                agenda_.push_back({t, Scheduled::FwStrike, 0.0});
            }
            for (double t : draw_event_times(sel_rate, seg.start, seg.end, sel_rng_)) {
                agenda_.push_back({t, Scheduled::SelStrike, 0.0});
            }
        } else {
            const double mean = (beam.nominal_flux + bg) * area * (seg.end - seg.start);
            const auto counts = scint_rng_.poisson(mean);
            // Reported when the translator moves the DUT back in.
            agenda_.push_back({seg.end, Scheduled::ScintCount, static_cast<double>(counts)});
        }
    }
    for (double t : draw_event_times(cfg_.dut.damaged_reset_rate, 0.0, total, soft_rng_)) {
        agenda_.push_back({t, Scheduled::SoftStrike, 0.0});
    }

    // Damage and break thresholds are exponential in accumulated fluence.
    if (cfg_.initial_health == Health::Fine && cfg_.dut.damage_hazard > 0.0) {
        const double phi = hazard_rng_.exponential(cfg_.dut.damage_hazard);
        const double t = time_at_fluence(tl, beam.nominal_flux, bg, phi);
        if (t < total) {
            agenda_.push_back({t, Scheduled::Damage, 0.0});
        }
    }
    if (cfg_.initial_health != Health::Broken) {
        double t = kInf;
        if (cfg_.forced_break_time) {
            t = *cfg_.forced_break_time;
        } else if (cfg_.dut.break_hazard > 0.0) {
            const double phi = hazard_rng_.exponential(cfg_.dut.break_hazard);
            t = time_at_fluence(tl, beam.nominal_flux, bg, phi);
        }
        if (t < total) {
            agenda_.push_back({t, Scheduled::Break, 0.0});
        }
    }

    for (const auto& item : agenda_) {
        if (!std::isfinite(item.t)) {
            throw InternalError("non-finite scheduled time");
        }
    }
    std::stable_sort(agenda_.begin(), agenda_.end(), [](const Item& a, const Item& b) {
        if (a.t != b.t) {
            return a.t < b.t;
        }
        return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    });
}

void CampaignRunner::advance_to(double t) {
    if (!std::isfinite(t) || t < now_) {
        throw InternalError("simulation clock moved backwards or became non-finite");
    }
    const auto& seg = result_.timeline.segments[segment_];
    const double flux = (seg.phase == Phase::Gpio ? cfg_.beam.nominal_flux : 0.0) +
                        cfg_.beam.background_flux.value();
    fluence_ += flux * (t - now_);
    if (firmware_ == Firmware::Running) {
        last_heartbeat_ = t;
    }
    now_ = t;
}

double CampaignRunner::watchdog_fire_time() const {
    if (!armed_ || !power_on_ || firmware_ != Firmware::Blocked) {
        return kInf;
    }
    const double t = std::max(watchdog_deadline(watchdog_ref_, cfg_.watchdog_timeout), window_.start);
    return t < window_.end ? std::max(t, now_) : kInf;
}

double CampaignRunner::noiseless_sum_a() const {
    double ma = 0.0;
    for (const auto& ch : cfg_.dut.channels) {
        ma += ch.nominal_ma;
    }
    if (health_ == Health::Broken) {
        ma -= cfg_.dut.broken_current_drop_ma;
    }
    return ma / 1000.0 + latched_a_;
}

void CampaignRunner::start_boot(double t) {
    firmware_ = Firmware::Booting;
    boot_done_at_ = t + cfg_.reset_overhead;
    watchdog_ref_ = t;
}

void CampaignRunner::finish_boot(double t) {
    boot_done_at_ = kInf;
    if (health_ == Health::Broken || block_pending_) {
        firmware_ = Firmware::Blocked;
    } else {
        firmware_ = Firmware::Running;
        last_heartbeat_ = t;
    }
    block_pending_ = false;
    watchdog_ref_ = t;
}

void CampaignRunner::hard_reset(double t) {
    log(t, EventKind::HardReset);
    latched_a_ = 0.0;
    block_pending_ = false;
    start_boot(t);
}

void CampaignRunner::power_restore(double t) {
    power_restore_at_ = kInf;
    power_on_ = true;
    log(t, EventKind::PowerOn);
    start_boot(t);
}

void CampaignRunner::handle(const Item& item) {
    const double t = item.t;
    switch (item.kind) {
        case Scheduled::PhaseBoundary:
            segment_ = static_cast<std::size_t>(item.value);
            break;
        case Scheduled::WindowStart:
            window_ = result_.test_windows[static_cast<std::size_t>(item.value)];
            armed_ = true;
            break;
        case Scheduled::WindowEnd:
            armed_ = false;
            break;
        case Scheduled::FwStrike:
            if (!power_on_) {
                break;
            }
            log(t, EventKind::FwBlock);
            if (firmware_ == Firmware::Running) {
                firmware_ = Firmware::Blocked;
                watchdog_ref_ = t;
            } else if (firmware_ == Firmware::Booting) {
                block_pending_ = true;
            }
            break;
        case Scheduled::SelStrike:
            if (!power_on_) {
                break;
            }
            latched_a_ += cfg_.dut.sel_surge_current_a;
            if (latchup_check(noiseless_sum_a(), cfg_.latchup_threshold) == LatchupAction::SelPowerOff) {
                log(t, EventKind::Sel, noiseless_sum_a());
                log(t, EventKind::PowerOff);
                power_on_ = false;
                firmware_ = Firmware::Unpowered;
                boot_done_at_ = kInf;
                block_pending_ = false;
                latched_a_ = 0.0;
                power_restore_at_ = t + cfg_.latchup_deadtime;
            }
            break;
        case Scheduled::SoftStrike:
            if (power_on_ && health_ == Health::Damaged && firmware_ == Firmware::Running) {
                log(t, EventKind::SoftReset);
                start_boot(t);
            }
            break;
        case Scheduled::Damage:
            if (health_ == Health::Fine) {
                health_ = Health::Damaged;
            }
            break;
        case Scheduled::Break:
            if (health_ != Health::Broken) {
                health_ = Health::Broken;
                log(t, EventKind::Break, fluence_);
                eeprom_corrupted_ = eeprom_rng_.bernoulli(cfg_.dut.eeprom_flip_probability);
                if (firmware_ == Firmware::Running) {
                    firmware_ = Firmware::Blocked;
                    watchdog_ref_ = t;
                }
            }
            break;
        case Scheduled::ScintCount:
            log(t, EventKind::ScintCount, item.value);
            break;
    }
}

void CampaignRunner::sample(double t) {
    TelemetryRecord rec;
    // Samples carry the logger's resolution: 1 ms in time, 1 uA per channel.
    rec.t = std::round(t * 1000.0) / 1000.0;
    rec.power_on = power_on_;
    const Phase seg_phase = result_.timeline.segments[segment_].phase;
    rec.phase = seg_phase == Phase::BeamMonitor ? Phase::BeamMonitor : (armed_ ? Phase::Gpio : Phase::Off);
    rec.heartbeat_ok = power_on_ && firmware_ == Firmware::Running;
    if (power_on_) {
        const auto& channels = cfg_.dut.channels;
        rec.currents_ma.resize(channels.size());
        double sum_ma = 0.0;
        for (std::size_t i = 0; i < channels.size(); ++i) {
            double ma = channels[i].nominal_ma + noise_rng_.normal(0.0, channel_noise_ma_);
            if (i == adc_index_ && health_ == Health::Broken) {
                ma -= cfg_.dut.broken_current_drop_ma;
            }
            if (i == hall_index_) {
                ma += latched_a_ * 1000.0;
            }
            ma = std::round(std::max(ma, 0.0) * 1000.0) / 1000.0;
            rec.currents_ma[i] = ma;
            sum_ma += ma;
        }
        rec.current_sum_a = sum_ma / 1000.0;
        last_currents_ = rec.currents_ma;
    }
    result_.telemetry.push_back(std::move(rec));
}

CampaignResult CampaignRunner::run() {
    result_.timeline = generate_phase_timeline(cfg_);
    result_.test_windows = gpio_test_windows(result_.timeline, cfg_.gpio_cycle, cfg_.gpio_window);
    adc_index_ = cfg_.dut.adc_index().value_or(0);
    hall_index_ = cfg_.dut.channels.size() - 1;
    for (std::size_t i = 0; i < cfg_.dut.channels.size(); ++i) {
        if (cfg_.dut.channels[i].pin == "EXTERNAL") {
            hall_index_ = i;
        }
    }
    channel_noise_ma_ =
        cfg_.dut.baseline_current.uncertainty() / std::sqrt(static_cast<double>(cfg_.dut.channels.size()));
    health_ = cfg_.initial_health;
    schedule();

    const double total = cfg_.total_duration;
    start_boot(0.0);
    finish_boot(0.0);

    std::size_t next = 0;
    std::size_t tick_index = 0;
    const auto tick_time = [&] {
        if (!opts_.record_telemetry) {
            return kInf;
        }
        const double t = static_cast<double>(tick_index) * cfg_.tick;
        return t < total ? t : kInf;
    };

    for (;;) {
        const double t_sched = next < agenda_.size() ? agenda_[next].t : kInf;
        const double t_restore = power_restore_at_;
        const double t_boot = boot_done_at_;
        const double t_watchdog = watchdog_fire_time();
        const double t_dyn = std::min({t_restore, t_boot, t_watchdog});
        const double t_tick = tick_time();
        const double t_next = std::min({t_sched, t_dyn, t_tick});
        if (!(t_next < total)) {
            break;
        }
        advance_to(t_next);
        if (t_dyn <= t_sched && t_dyn <= t_tick) {
            if (t_restore == t_dyn) {
                power_restore(t_dyn);
            } else if (t_boot == t_dyn) {
                finish_boot(t_dyn);
            } else {
                hard_reset(t_dyn);
            }
        } else if (t_sched <= t_tick) {
            handle(agenda_[next++]);
        } else {
            sample(t_tick);
            ++tick_index;
        }
    }
    advance_to(total);
    // A monitor segment closing the campaign still reports its count.
    for (; next < agenda_.size(); ++next) {
        if (agenda_[next].kind == Scheduled::ScintCount && agenda_[next].t <= total) {
            handle(agenda_[next]);
        }
    }

    result_.final_state.health = health_;
    result_.final_state.power_on = power_on_;
    result_.final_state.last_heartbeat = last_heartbeat_;
    result_.final_state.accumulated_fluence = fluence_;
    result_.final_state.currents_ma = last_currents_;
    if (!std::isfinite(fluence_)) {
        throw InternalError("accumulated fluence became non-finite");
    }

    const auto& base = cfg_.dut.baseline_current;
    result_.current_pre = base;
    result_.current_post = health_ == Health::Broken
                               ? Quantity(base.value() - cfg_.dut.broken_current_drop_ma, base.uncertainty(),
                                          base.unit())
                               : base;
    result_.eeprom_pre = io::sha256_hex("eeprom-image:" + cfg_.campaign_id);
    result_.eeprom_post = eeprom_corrupted_ ? io::sha256_hex(result_.eeprom_pre + ":upset") : result_.eeprom_pre;
    return std::move(result_);
}

}  // namespace

double PhaseTimeline::duration() const { return segments.empty() ? 0.0 : segments.back().end; }

double PhaseTimeline::gpio_time() const {
    double total = 0.0;
    for (const auto& s : segments) {
        if (s.phase == Phase::Gpio) {
            total += s.end - s.start;
        }
    }
    return total;
}

double PhaseTimeline::beam_monitor_time() const {
    double total = 0.0;
    for (const auto& s : segments) {
        if (s.phase == Phase::BeamMonitor) {
            total += s.end - s.start;
        }
    }
    return total;
}

Phase PhaseTimeline::phase_at(double t) const {
    for (const auto& s : segments) {
        if (t >= s.start && t < s.end) {
            return s.phase;
        }
    }
    return Phase::Off;
}

PhaseTimeline generate_phase_timeline(const CampaignConfig& config) {
    require_valid(config);
    PhaseTimeline tl;
    const double total = config.total_duration;
    if (config.phase_plan.single_phase) {
        tl.segments.push_back({0.0, total, Phase::Gpio});
        return tl;
    }
    double t = 0.0;
    bool gpio = true;
    while (t < total) {
        const double d = gpio ? config.phase_plan.gpio_duration : config.phase_plan.beam_monitor_duration;
        const double end = std::min(t + d, total);
        tl.segments.push_back({t, end, gpio ? Phase::Gpio : Phase::BeamMonitor});
        t = end;
        gpio = !gpio;
    }
    return tl;
}

std::vector<TimeWindow> gpio_test_windows(const PhaseTimeline& timeline, double cycle, double window) {
    if (!(cycle > 0.0) || !(window > 0.0)) {
        throw DomainError("gpio_test_windows: cycle and window must be > 0");
    }
    std::vector<TimeWindow> out;
    for (const auto& seg : timeline.segments) {
        if (seg.phase != Phase::Gpio) {
            continue;
        }
        for (std::size_t k = 0;; ++k) {
            const double start = seg.start + static_cast<double>(k) * cycle;
            if (!(start < seg.end)) {
                break;
            }
            out.push_back({start, std::min(start + window, seg.end)});
        }
    }
    return out;
}

double cumulative_fluence(const PhaseTimeline& timeline, double beam_flux, double background, double t) {
    double total = background * std::clamp(t, 0.0, timeline.duration());
    for (const auto& s : timeline.segments) {
        if (s.phase == Phase::Gpio && t > s.start) {
            total += beam_flux * (std::min(t, s.end) - s.start);
        }
    }
    return total;
}

double time_at_fluence(const PhaseTimeline& timeline, double beam_flux, double background, double fluence) {
    if (fluence <= 0.0) {
        return 0.0;
    }
    double acc = 0.0;
    for (const auto& s : timeline.segments) {
        const double rate = (s.phase == Phase::Gpio ? beam_flux : 0.0) + background;
        const double gain = rate * (s.end - s.start);
        if (rate > 0.0 && acc + gain >= fluence) {
            return s.start + (fluence - acc) / rate;
        }
        acc += gain;
    }
    return kInf;
}

std::vector<double> draw_event_times(double rate, double t0, double t1, RngStream& rng) {
    std::vector<double> out;
    if (!(rate > 0.0) || !(t1 > t0)) {
        return out;
    }
    double t = t0;
    for (;;) {
        t += rng.exponential(rate);
        if (!(t < t1)) {
            break;
        }
        out.push_back(t);
    }
    return out;
}

WatchdogAction watchdog_check(double now, double last_heartbeat, double timeout) {
    return now - last_heartbeat > timeout ? WatchdogAction::HardReset : WatchdogAction::None;
}

LatchupAction latchup_check(double current_sum_a, double threshold_a) {
    return current_sum_a > threshold_a ? LatchupAction::SelPowerOff : LatchupAction::None;
}

DutState anneal(const DutState& state, double days, const DutProfile& profile) {
    DutState out = state;
    if (state.health == Health::Broken && profile.anneal_recovery && days >= profile.anneal_recovery_days) {
        out.health = Health::Damaged;
    }
    return out;
}

CampaignResult run_campaign(const CampaignConfig& config, const RunOptions& options) {
    require_valid(config);
    return CampaignRunner(config, options).run();
}

}  // namespace seebench::sim
