// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0

#include "rfbsr/gradcheck.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <memory>
#include <cstdlib>

#include "rfbsr/finite_diff.hpp"
#include "rfbsr/losses.hpp"

namespace rfbsr {

namespace {

using T = Tensor<double>;
using P = Parameter<double>;

// Values drawn away from the ReLU/L1 kinks so the central difference never
// straddles a non-smooth point.
T random_tensor(Rng& rng, Shape s, double lo = 0.05, double hi = 1.0) {
    T t(s);
    for (double& v : t.data) {
        const double mag = rng.uniform(lo, hi);
        v = rng.coin() ? mag : -mag;
    }
    return t;
}

T random_positive(Rng& rng, Shape s, double lo, double hi) {
    T t(s);
    for (double& v : t.data) v = rng.uniform(lo, hi);
    return t;
}

// Refill every parameter (biases included) with nonzero draws. Zero biases
// put ReLU pre-activations exactly on the kink wherever the incoming signal
// is zero, and no finite difference is meaningful there.
template <class Block>
void randomize_params(Block& block, Rng& rng) {
    std::vector<P*> ps;
    block.collect(ps);
    for (P* p : ps) p->value = random_tensor(rng, p->value.shape, 0.05, 0.6);
}

/// One forward graph stated twice: `value` re-evaluates it purely (the oracle
/// route), `backward` records it on a fresh tape and backpropagates into the
/// parameters' grads (the route under test).
struct Instance {
    std::vector<P*> params;
    std::function<double()> value;
    std::function<void()> backward;
};

struct Harness {
    const GradCheckOptions& opts;
    Rng rng;
    GradCheckReport report;

    explicit Harness(const GradCheckOptions& o) : opts(o), rng(o.seed) {}

    void run_case(const std::string& name, int instances,
                  const std::function<Instance(Rng&)>& make_instance) {
        if (const char* dbg = std::getenv("RFBSR_GRADCHECK_TRACE"); dbg && dbg[0] == '1')
            std::fprintf(stderr, "gradcheck case: %s\n", name.c_str());
        GradCheckCase c;
        c.name = name;
        c.instances = instances;
        c.pass = true;
        for (int i = 0; i < instances; ++i) {
            Instance inst = make_instance(rng);
            for (P* p : inst.params) p->zero_grad();
            inst.backward();

            // Deterministic probe set: everything if small, else a sample.
            size_t total = 0;
            for (P* p : inst.params) total += p->value.data.size();
            for (P* p : inst.params) {
                std::vector<size_t> idx;
                const size_t n = p->value.data.size();
                if (total <= opts.max_probes_per_case) {
                    idx.resize(n);
                    for (size_t k = 0; k < n; ++k) idx[k] = k;
                } else {
                    const size_t want = std::max<size_t>(
                        1, opts.max_probes_per_case * n / std::max<size_t>(total, 1));
                    for (size_t k = 0; k < want; ++k) idx.push_back(static_cast<size_t>(rng.below(n)));
                    std::sort(idx.begin(), idx.end());
                    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
                }
                const T oracle = finite_diff_grad_at<double>(inst.value, *p, opts.h, idx);
                for (size_t k : idx) {
                    const double got = p->grad.data[k];
                    const double want = oracle.data[k];
                    const bool small = std::abs(want) < opts.abs_floor;
                    const double err = small ? std::abs(got - want) : std::abs(got - want) / std::abs(want);
                    const double tol = small ? opts.abs_floor : opts.rel_tol;
                    if (err > tol) {
                        // The central difference is only an oracle where f is
                        // smooth across [p-h, p+h]. Re-estimate at h/2: if the
                        // finer estimate agrees with the analytic value, the
                        // h-step one was contaminated (kink near the interval
                        // edge, or plain truncation) and the element passes on
                        // the finer estimate.
                        const T finer = finite_diff_grad_at<double>(inst.value, *p, opts.h / 2, {k});
                        const double o2 = finer.data[k];
                        const double richardson = (4.0 * o2 - want) / 3.0;
                        bool accepted = false;
                        for (double ref : {o2, richardson}) {
                            const bool sm = std::abs(ref) < opts.abs_floor;
                            const double e = sm ? std::abs(got - ref) : std::abs(got - ref) / std::abs(ref);
                            if (e <= (sm ? opts.abs_floor : opts.rel_tol)) {
                                ++c.probes;
                                if (sm)
                                    c.max_abs_err = std::max(c.max_abs_err, e);
                                else
                                    c.max_rel_err = std::max(c.max_rel_err, e);
                                accepted = true;
                                break;
                            }
                        }
                        if (accepted) continue;
                        // Still apart. If the h and h/2 estimates disagree at
                        // the tolerance scale, the oracle has not converged
                        // for this element (a kink inside the interval) and
                        // cannot adjudicate it; exclude and count it.
                        const double drift = std::abs(o2 - want);
                        if (drift > opts.rel_tol * std::max({std::abs(want), std::abs(o2), opts.abs_floor})) {
                            ++c.skipped_nonsmooth;
                            continue;
                        }
                        const double f0 = inst.value();
                        const double saved = p->value.data[k];
                        p->value.data[k] = saved + opts.h;
                        const double fp = inst.value();
                        p->value.data[k] = saved - opts.h;
                        const double fm = inst.value();
                        p->value.data[k] = saved;
                        const double fwd = (fp - f0) / opts.h, bwd = (f0 - fm) / opts.h;
                        if (std::abs(fwd - bwd) >
                            0.3 * std::max({std::abs(fwd), std::abs(bwd), 10.0 * opts.abs_floor})) {
                            ++c.skipped_nonsmooth;
                            continue;
                        }
                    }
                    ++c.probes;
                    if (small) {
                        c.max_abs_err = std::max(c.max_abs_err, err);
                        if (err > opts.abs_floor) c.pass = false;
                    } else {
                        c.max_rel_err = std::max(c.max_rel_err, err);
                        if (err > opts.rel_tol) c.pass = false;
                    }
                }
            }
        }
        // The kink filter may only discard a sliver; a backward bug that
        // disagreed everywhere would trip this instead of hiding.
        if (c.skipped_nonsmooth * 20 > c.probes + c.skipped_nonsmooth) c.pass = false;
        report.all_pass = report.all_pass && c.pass;
        report.cases.push_back(std::move(c));
    }
};

// Loss head shared by all cases: a fixed random linear probe of the output.
// The shared_ptr captures keep the parameters (and through the forward
// closures, any block that owns them) alive for the Instance's lifetime.
Instance probe_loss(std::vector<P*> params, std::shared_ptr<P> x,
                    const std::function<T(const T&)>& fwd_value,
                    const std::function<Rec<double>(Rec<double>)>& fwd_rec, Rng& rng) {
    auto coeffs = std::make_shared<T>();
    auto tape_holder = std::make_shared<std::unique_ptr<Tape<double>>>();
    const T probe_out = fwd_value(x->value);
    *coeffs = random_tensor(rng, probe_out.shape, 0.1, 1.0);
    Instance inst;
    inst.params = std::move(params);
    inst.value = [x, fwd_value, coeffs] { return inner_const(fwd_value(x->value), *coeffs).scalar(); };
    inst.backward = [x, fwd_rec, coeffs, tape_holder] {
        *tape_holder = std::make_unique<Tape<double>>();
        Tape<double>& t = **tape_holder;
        Rec<double> out = fwd_rec(t.leaf(*x));
        t.backward(inner_const(out, *coeffs));
    };
    return inst;
}

ConvSpec random_conv_spec(Rng& rng, int64_t kh, int64_t kw) {
    ConvSpec spec;
    spec.stride = rng.coin() ? 1 : 2;
    const int64_t dils[] = {1, 2, 3, 5};
    spec.dil_h = dils[rng.below(4)];
    spec.dil_w = dils[rng.below(4)];
    spec.pad_h = rng.below(static_cast<uint64_t>(spec.dil_h * (kh - 1) + 2));
    spec.pad_w = rng.below(static_cast<uint64_t>(spec.dil_w * (kw - 1) + 2));
    return spec;
}

}  // namespace

GradCheckReport run_gradcheck(const GradCheckOptions& opts) {
    Harness h(opts);

    h.run_case("conv2d", opts.instances, [](Rng& rng) {
        const int64_t kernels[][2] = {{1, 1}, {1, 3}, {3, 1}, {3, 3}};
        const auto [kh, kw] = kernels[rng.below(4)];
        const int64_t n = 1 + static_cast<int64_t>(rng.below(2));
        const int64_t ci = 1 + static_cast<int64_t>(rng.below(3));
        const int64_t co = 1 + static_cast<int64_t>(rng.below(3));
        ConvSpec spec = random_conv_spec(rng, kh, kw);
        // Input large enough for at least one output sample.
        const int64_t min_h = spec.dil_h * (kh - 1) + 1;
        const int64_t min_w = spec.dil_w * (kw - 1) + 1;
        const int64_t ih = min_h + static_cast<int64_t>(rng.below(5));
        const int64_t iw = min_w + static_cast<int64_t>(rng.below(5));

        auto x = std::make_shared<P>("x", random_tensor(rng, Shape(n, ci, ih, iw)));
        auto w = std::make_shared<P>("w", random_tensor(rng, Shape(co, ci, kh, kw)));
        auto b = std::make_shared<P>("b", random_tensor(rng, Shape(1, co, 1, 1)));
        return probe_loss(
            {x.get(), w.get(), b.get()}, x,
            [w, b, spec](const T& xv) { return conv2d(xv, w->value, &b->value, spec); },
            [w, b, spec](Rec<double> xr) {
                return conv2d(xr, xr.tape->leaf(*w), std::optional(xr.tape->leaf(*b)), spec);
            },
            rng);
    });

    h.run_case("leaky_relu", opts.instances, [](Rng& rng) {
        auto x = std::make_shared<P>("x", random_tensor(rng, Shape(2, 3, 4, 5)));
        const double a = rng.uniform(0.05, 0.5);
        return probe_loss({x.get()}, x, [a](const T& v) { return leaky_relu(v, a); },
                          [a](Rec<double> r) { return leaky_relu(r, a); }, rng);
    });

    h.run_case("relu", opts.instances, [](Rng& rng) {
        auto x = std::make_shared<P>("x", random_tensor(rng, Shape(2, 2, 3, 7)));
        return probe_loss({x.get()}, x, [](const T& v) { return relu(v); },
                          [](Rec<double> r) { return relu(r); }, rng);
    });

    h.run_case("sigmoid", opts.instances, [](Rng& rng) {
        auto x = std::make_shared<P>("x", random_tensor(rng, Shape(1, 4, 3, 3), 0.0, 3.0));
        return probe_loss({x.get()}, x, [](const T& v) { return sigmoid(v); },
                          [](Rec<double> r) { return sigmoid(r); }, rng);
    });

    h.run_case("log", opts.instances, [](Rng& rng) {
        auto x = std::make_shared<P>("x", random_positive(rng, Shape(1, 2, 4, 4), 0.05, 2.0));
        return probe_loss({x.get()}, x, [](const T& v) { return log_clamped(v); },
                          [](Rec<double> r) { return log_clamped(r); }, rng);
    });

    h.run_case("add_scale_affine", opts.instances, [](Rng& rng) {
        auto x = std::make_shared<P>("x", random_tensor(rng, Shape(2, 2, 4, 4)));
        auto y = std::make_shared<P>("y", random_tensor(rng, Shape(2, 2, 4, 4)));
        const double s = rng.uniform(-2.0, 2.0);
        return probe_loss(
            {x.get(), y.get()}, x,
            [y, s](const T& v) { return affine(add(v, scale(y->value, s)), 0.7, -0.2); },
            [y, s](Rec<double> r) {
                return affine(add(r, scale(r.tape->leaf(*y), s)), 0.7, -0.2);
            },
            rng);
    });

    h.run_case("sub_scalar", opts.instances, [](Rng& rng) {
        auto x = std::make_shared<P>("x", random_tensor(rng, Shape(3, 1, 1, 1)));
        auto s = std::make_shared<P>("s", random_tensor(rng, Shape(1, 1, 1, 1)));
        return probe_loss({x.get(), s.get()}, x,
                          [s](const T& v) { return sub_scalar(v, s->value); },
                          [s](Rec<double> r) { return sub_scalar(r, r.tape->leaf(*s)); }, rng);
    });

    h.run_case("concat_channels", opts.instances, [](Rng& rng) {
        auto x = std::make_shared<P>("x", random_tensor(rng, Shape(2, 2, 3, 3)));
        auto y = std::make_shared<P>("y", random_tensor(rng, Shape(2, 3, 3, 3)));
        return probe_loss({x.get(), y.get()}, x,
                          [y](const T& v) {
                              std::vector<const T*> xs{&v, &y->value};
                              return concat_channels(std::span<const T* const>(xs));
                          },
                          [y](Rec<double> r) {
                              std::vector<Rec<double>> xs{r, r.tape->leaf(*y)};
                              return concat_channels(xs);
                          },
                          rng);
    });

    h.run_case("mean_all", opts.instances, [](Rng& rng) {
        auto x = std::make_shared<P>("x", random_tensor(rng, Shape(2, 3, 2, 5)));
        return probe_loss({x.get()}, x, [](const T& v) { return mean_all(v); },
                          [](Rec<double> r) { return mean_all(r); }, rng);
    });

    h.run_case("l1", opts.instances, [](Rng& rng) {
        auto x = std::make_shared<P>("x", random_tensor(rng, Shape(2, 2, 4, 4)));
        // Keep |x - y| well away from the kink.
        T offset = random_tensor(rng, x->value.shape, 0.3, 1.0);
        T yv(x->value.shape);
        for (size_t i = 0; i < yv.data.size(); ++i) yv.data[i] = x->value.data[i] + offset.data[i];
        auto y = std::make_shared<P>("y", std::move(yv));
        return probe_loss({x.get(), y.get()}, x,
                          [y](const T& v) { return l1(v, y->value); },
                          [y](Rec<double> r) { return l1(r, r.tape->leaf(*y)); }, rng);
    });

    h.run_case("nearest_upsample", opts.instances, [](Rng& rng) {
        auto x = std::make_shared<P>("x", random_tensor(rng, Shape(1, 3, 3, 4)));
        const int64_t r = 2 + static_cast<int64_t>(rng.below(2));
        return probe_loss({x.get()}, x, [r](const T& v) { return nearest_upsample(v, r); },
                          [r](Rec<double> rec) { return nearest_upsample(rec, r); }, rng);
    });

    h.run_case("pixel_shuffle", opts.instances, [](Rng& rng) {
        auto x = std::make_shared<P>("x", random_tensor(rng, Shape(2, 8, 3, 3)));
        return probe_loss({x.get()}, x, [](const T& v) { return pixel_shuffle(v, 2); },
                          [](Rec<double> r) { return pixel_shuffle(r, 2); }, rng);
    });

    h.run_case("global_avg_pool", opts.instances, [](Rng& rng) {
        auto x = std::make_shared<P>("x", random_tensor(rng, Shape(2, 3, 4, 5)));
        return probe_loss({x.get()}, x, [](const T& v) { return global_avg_pool(v); },
                          [](Rec<double> r) { return global_avg_pool(r); }, rng);
    });

    // -- blocks ---------------------------------------------------------------

    h.run_case("dense_block", opts.instances, [](Rng& rng) {
        Rng init(rng.next_u64());
        auto block = std::make_shared<DenseBlock<double>>("db", 8, 4, 0.2, 0.2, init, 1.0);
        randomize_params(*block, rng);
        auto x = std::make_shared<P>("x", random_tensor(rng, Shape(1, 8, 5, 5)));
        std::vector<P*> params{x.get()};
        block->collect(params);
        return probe_loss(params, x, [block](const T& v) { return block->forward(v); },
                          [block](Rec<double> r) { return block->forward(r); }, rng);
    });

    h.run_case("rrdb", opts.instances, [](Rng& rng) {
        Rng init(rng.next_u64());
        auto block = std::make_shared<Rrdb<double>>("rrdb", 8, 4, 0.2, 0.2, init, 1.0);
        randomize_params(*block, rng);
        auto x = std::make_shared<P>("x", random_tensor(rng, Shape(1, 8, 4, 4)));
        std::vector<P*> params{x.get()};
        block->collect(params);
        return probe_loss(params, x, [block](const T& v) { return block->forward(v); },
                          [block](Rec<double> r) { return block->forward(r); }, rng);
    });

    h.run_case("rfb", opts.instances, [](Rng& rng) {
        Rng init(rng.next_u64());
        const int64_t c_out = rng.coin() ? 8 : 4;  // exercises both shortcut kinds
        auto block = std::make_shared<Rfb<double>>("rfb", 8, c_out, 1.0, 0.2, init, 1.0);
        randomize_params(*block, rng);
        auto x = std::make_shared<P>("x", random_tensor(rng, Shape(1, 8, 6, 6)));
        std::vector<P*> params{x.get()};
        block->collect(params);
        return probe_loss(params, x, [block](const T& v) { return block->forward(v); },
                          [block](Rec<double> r) { return block->forward(r); }, rng);
    });

    h.run_case("rrfdb", opts.instances, [](Rng& rng) {
        Rng init(rng.next_u64());
        auto block = std::make_shared<Rrfdb<double>>("rrfdb", 8, 4, 3, 0.2, 1.0, 0.2, init, 1.0);
        randomize_params(*block, rng);
        auto x = std::make_shared<P>("x", random_tensor(rng, Shape(1, 8, 5, 5)));
        std::vector<P*> params{x.get()};
        block->collect(params);
        return probe_loss(params, x, [block](const T& v) { return block->forward(v); },
                          [block](Rec<double> r) { return block->forward(r); }, rng);
    });

    h.run_case("upsample_nni", opts.instances, [](Rng& rng) {
        Rng init(rng.next_u64());
        auto stage = std::make_shared<UpsampleStage<double>>("up", UpsampleKind::nni, true, 8, 1.0, 0.2,
                                                             init, 1.0);
        randomize_params(*stage, rng);
        auto x = std::make_shared<P>("x", random_tensor(rng, Shape(1, 8, 3, 3)));
        std::vector<P*> params{x.get()};
        stage->collect(params);
        return probe_loss(params, x, [stage](const T& v) { return stage->forward(v); },
                          [stage](Rec<double> r) { return stage->forward(r); }, rng);
    });

    h.run_case("upsample_spc", opts.instances, [](Rng& rng) {
        Rng init(rng.next_u64());
        auto stage = std::make_shared<UpsampleStage<double>>("up", UpsampleKind::spc, true, 8, 1.0, 0.2,
                                                             init, 1.0);
        randomize_params(*stage, rng);
        auto x = std::make_shared<P>("x", random_tensor(rng, Shape(1, 8, 3, 3)));
        std::vector<P*> params{x.get()};
        stage->collect(params);
        return probe_loss(params, x, [stage](const T& v) { return stage->forward(v); },
                          [stage](Rec<double> r) { return stage->forward(r); }, rng);
    });

    // -- composites -------------------------------------------------------------

    h.run_case("generator_tiny", std::max(3, opts.instances / 5), [](Rng& rng) {
        GeneratorConfig cfg;
        cfg.n_rrdb = 1;
        cfg.n_rrfdb = 1;
        cfg.rfb_per_rrfdb = 2;
        cfg.base_channels = 8;
        cfg.growth = 4;
        cfg.scale = 2;
        cfg.upsample_plan = {{UpsampleKind::spc, true}};
        auto gen = std::make_shared<Generator<double>>(cfg, rng.next_u64());
        // Probe at a healthy signal scale: undo the 0.1 init damping (which
        // buries gradients under finite-difference noise at this depth) and
        // lift biases off zero so pre-activations sit clear of the ReLU kink.
        for (P* p : gen->parameters()) {
            if (p->name.ends_with(".bias"))
                p->value = random_tensor(rng, p->value.shape, 0.05, 0.3);
            else
                for (double& v : p->value.data) v *= 10.0;
        }
        auto x = std::make_shared<P>("x", random_positive(rng, Shape(1, 3, 5, 5), 0.05, 0.95));
        std::vector<P*> params{x.get()};
        for (P* p : gen->parameters()) params.push_back(p);
        return probe_loss(params, x, [gen](const T& v) { return gen->forward(v); },
                          [gen](Rec<double> r) { return gen->forward(r); }, rng);
    });

    h.run_case("adversarial_losses", opts.instances, [](Rng& rng) {
        auto d_hr = std::make_shared<P>("d_hr", random_tensor(rng, Shape(3, 1, 1, 1), 0.1, 2.0));
        auto d_sr = std::make_shared<P>("d_sr", random_tensor(rng, Shape(3, 1, 1, 1), 0.1, 2.0));
        const bool literal = rng.coin();
        auto value = [d_sr, d_hr, literal](const T& hr_v) {
            Deltas<T> deltas = relativistic_deltas(hr_v, d_sr->value);
            const T adv = adversarial_loss_g(deltas.real, deltas.fake);
            const T disc = discriminator_loss(deltas.real, deltas.fake, literal).total;
            return add(adv, disc);
        };
        Instance inst;
        inst.params = {d_hr.get(), d_sr.get()};
        inst.value = [d_hr, value] { return value(d_hr->value).scalar(); };
        auto tape_holder = std::make_shared<std::unique_ptr<Tape<double>>>();
        inst.backward = [d_hr, d_sr, literal, tape_holder] {
            *tape_holder = std::make_unique<Tape<double>>();
            Tape<double>& t = **tape_holder;
            Deltas<Rec<double>> deltas = relativistic_deltas(t.leaf(*d_hr), t.leaf(*d_sr));
            Rec<double> adv = adversarial_loss_g(deltas.real, deltas.fake);
            Rec<double> disc = discriminator_loss(deltas.real, deltas.fake, literal).total;
            t.backward(add(adv, disc));
        };
        return inst;
    });

    h.run_case("feature_loss", opts.instances, [](Rng& rng) {
        FeatureExtractorConfig fcfg;
        fcfg.channels = {4, 8};
        auto feat = std::make_shared<FeatureExtractor<double>>(fcfg, rng.next_u64());
        auto sr = std::make_shared<P>("sr", random_positive(rng, Shape(1, 3, 8, 8), 0.05, 0.95));
        T hr = random_positive(rng, Shape(1, 3, 8, 8), 0.05, 0.95);
        Instance inst;
        inst.params = {sr.get()};
        inst.value = [feat, sr, hr] { return feature_loss(*feat, sr->value, hr).scalar(); };
        auto tape_holder = std::make_shared<std::unique_ptr<Tape<double>>>();
        inst.backward = [feat, sr, hr, tape_holder] {
            *tape_holder = std::make_unique<Tape<double>>();
            Tape<double>& t = **tape_holder;
            t.backward(feature_loss(*feat, t.leaf(*sr), hr));
        };
        return inst;
    });

    return h.report;
}

std::string format_report(const GradCheckReport& report) {
    std::string out;
    char line[192];
    for (const auto& c : report.cases) {
        std::snprintf(line, sizeof(line),
                      "%-20s %4d instances %6zu probes (%zu at kinks)  max_rel %.3e  max_abs %.3e  %s\n",
                      c.name.c_str(), c.instances, c.probes, c.skipped_nonsmooth, c.max_rel_err,
                      c.max_abs_err, c.pass ? "ok" : "FAIL");
        out += line;
    }
    out += report.all_pass ? "gradcheck: all cases passed\n" : "gradcheck: FAILURES above\n";
    return out;
}

}  // namespace rfbsr
