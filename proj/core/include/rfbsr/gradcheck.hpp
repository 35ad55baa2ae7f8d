// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rfbsr {

struct GradCheckOptions {
    int instances = 20;     // random instances per case
    uint64_t seed = 20260801;
    double h = 1e-5;        // central-difference step
    double rel_tol = 1e-4;  // for oracle elements with |g| >= abs_floor
    double abs_floor = 1e-8;  // tiny oracle elements are compared absolutely
    size_t max_probes_per_case = 400;  // cap on probed elements for big blocks
};

struct GradCheckCase {
    std::string name;
    int instances = 0;
    size_t probes = 0;
    size_t skipped_nonsmooth = 0;  // elements where the central difference
                                   // straddles an activation kink (no valid
                                   // oracle value there)
    double max_rel_err = 0.0;
    double max_abs_err = 0.0;  // among |oracle| < abs_floor elements
    bool pass = false;
};

struct GradCheckReport {
    std::vector<GradCheckCase> cases;
    bool all_pass = true;
};

/// Checks every differentiable op and block type against the 64-bit
/// central-difference oracle. Small operands are probed exhaustively; large
/// blocks on a deterministic random subset of parameter elements.
GradCheckReport run_gradcheck(const GradCheckOptions& opts = {});

std::string format_report(const GradCheckReport& report);

}  // namespace rfbsr
