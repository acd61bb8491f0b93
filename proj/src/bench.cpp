#include "ddae/bench.hpp"

namespace ddae {

namespace {

Mat mk(std::initializer_list<std::initializer_list<double>> rows) {
    const int r = static_cast<int>(rows.size());
    const int c = static_cast<int>(rows.begin()->size());
    Mat M(r, c);
    int i = 0;
    for (const auto& row : rows) {
        int j = 0;
        for (double v : row) M(i, j++) = v;
        ++i;
    }
    return M;
}

DelayTerm term(double d, Mat M) { return {d, std::move(M)}; }

ControllerTemplate static_gain(const Mat& K) {
    ControllerTemplate c;
    c.nK = 0;
    c.DK.push_back(ControllerTemplate::frozen_term(0.0, K));
    c.p0 = Vec::Zero(0);
    return c;
}

// Dynamic controller from the compact [AK BK; CK DK] display.
ControllerTemplate dyn_block(const Mat& blk, int nK) {
    ControllerTemplate c;
    c.nK = nK;
    c.AK.push_back(ControllerTemplate::frozen_term(0.0, blk.topLeftCorner(nK, nK)));
    c.BK.push_back(ControllerTemplate::frozen_term(0.0, blk.topRightCorner(nK, blk.cols() - nK)));
    c.CK.push_back(ControllerTemplate::frozen_term(0.0, blk.bottomLeftCorner(blk.rows() - nK, nK)));
    c.DK.push_back(ControllerTemplate::frozen_term(0.0, blk.bottomRightCorner(blk.rows() - nK, blk.cols() - nK)));
    c.p0 = Vec::Zero(0);
    return c;
}

PlantSpec heat11_plant(bool a66_literal_minus_one) {
    // 11-state heat-transfer loop with five state delays and one input delay.
    // The source lists the (6,6) entry of A0 twice (-0.0588 and -1). The
    // primary reading keeps -0.0588 and assigns the -1 to the otherwise
    // undamped state 11; the literal variant overwrites (6,6) with -1 and
    // leaves state 11 undriven. The input column is not listed at all; unit
    // injection into state 5 is the closest reading found by exhausting all
    // single-entry candidates.
    PlantSpec p;
    p.nG = 11;
    p.nw = 11;
    p.nu = 1;
    p.ny = 11;
    p.nz = 11;
    Mat A0 = Mat::Zero(11, 11);
    for (int k : {1, 3, 5, 9}) A0(k - 1, k - 1) = -0.2;
    A0(3, 6) = A0(3, 7) = A0(7, 2) = A0(7, 3) = 0.1417;
    A0(1, 1) = -0.04;
    A0(5, 5) = a66_literal_minus_one ? -1.0 : -0.0588;
    A0(9, 9) = -0.0667;
    A0(3, 2) = 0.1917;
    A0(7, 6) = 0.1917;
    A0(3, 3) = -0.04;
    A0(7, 7) = -0.04;
    if (!a66_literal_minus_one) A0(10, 10) = -1.0;
    Mat A1 = Mat::Zero(11, 11); A1(4, 3) = 0.195;
    Mat A2 = Mat::Zero(11, 11); A2(2, 1) = 0.1966; A2(5, 4) = 0.0529; A2(8, 7) = 0.194; A2(9, 8) = 0.0613;
    Mat A3 = Mat::Zero(11, 11); A3(0, 5) = 0.1946;
    Mat A4 = Mat::Zero(11, 11); A4(1, 0) = 0.0384;
    Mat A5 = Mat::Zero(11, 11); A5(6, 6) = -0.0159;
    p.A = {term(0, A0), term(3, A1), term(5, A2), term(15, A3), term(23, A4), term(29, A5)};
    p.B1 = {term(0, Mat::Identity(11, 11))};
    Mat Bu = Mat::Zero(11, 1);
    Bu(4, 0) = 1.0;
    p.B2 = {term(7, Bu)};
    p.C1 = {term(0, Mat::Identity(11, 11))};
    p.C2 = {term(0, Mat::Identity(11, 11))};
    return p;
}

std::vector<BenchCase> make_registry() {
    std::vector<BenchCase> reg;

    {
        BenchCase c;
        c.name = "c1_fridman2002_ex4";
        c.description = "descriptor-literature example, state feedback, delay 0.999";
        c.plant.nG = 2; c.plant.nw = 1; c.plant.nu = 1; c.plant.ny = 2; c.plant.nz = 2;
        c.plant.A = {term(0, mk({{0, 0}, {0, 1}})), term(0.999, mk({{-1, -1}, {0, -0.9}}))};
        c.plant.B1 = {term(0, mk({{1}, {1}}))};
        c.plant.B2 = {term(0, mk({{0}, {1}}))};
        c.plant.C1 = {term(0, mk({{0, 1}, {0, 0}}))};
        c.plant.D12 = {term(0, mk({{0}, {0.1}}))};
        c.plant.C2 = {term(0, Mat::Identity(2, 2))};
        c.rows.push_back({"K published", static_gain(mk({{-2.3273, -9.5004e3}})), 0.1000});
        c.note = "the norm approaches 0.1 from above as the second gain grows";
        reg.push_back(std::move(c));
    }
    {
        BenchCase c;
        c.name = "c2_fridman1998_ex1";
        c.description = "retarded two-state plant, state feedback, delay 0.1";
        c.plant.nG = 2; c.plant.nw = 1; c.plant.nu = 1; c.plant.ny = 2; c.plant.nz = 2;
        c.plant.A = {term(0, mk({{2, 1}, {0, -1}})), term(0.1, mk({{-1, 0}, {-1, 1}}))};
        c.plant.B1 = {term(0, mk({{-0.5}, {1}}))};
        c.plant.B2 = {term(0, mk({{3}, {1}}))};
        c.plant.C1 = {term(0, mk({{1, -0.5}, {0, 0}}))};
        c.plant.D12 = {term(0, mk({{0}, {1}}))};
        c.plant.C2 = {term(0, Mat::Identity(2, 2))};
        c.rows.push_back({"K published", static_gain(mk({{-17.8065, 9.5915}})), 0.4005});
        reg.push_back(std::move(c));
    }
    {
        BenchCase c;
        c.name = "c3_fridman_ex2";
        c.description = "genuine DDAE plant (singular E), state feedback, delay 1.2";
        c.plant.nG = 2; c.plant.nw = 1; c.plant.nu = 1; c.plant.ny = 2; c.plant.nz = 1;
        c.plant.E = mk({{1, 0}, {0, 0}});
        c.plant.A = {term(1.2, mk({{-1, 0}, {1, -1}}))};
        c.plant.B1 = {term(0, mk({{1}, {1}}))};
        c.plant.B2 = {term(0, mk({{-0.5}, {1}}))};
        c.plant.C1 = {term(0, mk({{1, 0.2}}))};
        c.plant.D12 = {term(0, mk({{0.1}}))};
        c.plant.C2 = {term(0, Mat::Identity(2, 2))};
        c.rows.push_back({"K published", static_gain(mk({{-1.1151e3, -1.6189e4}})), 2.9091});
        reg.push_back(std::move(c));
    }
    {
        BenchCase c;
        c.name = "c4_fridman_ex3";
        c.description = "DDAE plant, output feedback rows of increasing order";
        c.plant.nG = 2; c.plant.nw = 2; c.plant.nu = 1; c.plant.ny = 1; c.plant.nz = 1;
        c.plant.E = mk({{1, 0}, {0, 0}});
        c.plant.A = {term(0, mk({{0, 0}, {0, 1}})), term(1.2, mk({{-1, 0}, {1, -1}}))};
        c.plant.B1 = {term(0, mk({{1, 0}, {1, 0}}))};
        c.plant.B2 = {term(0, mk({{0}, {1}}))};
        c.plant.C1 = {term(0, mk({{1, 0.2}}))};
        c.plant.D12 = {term(0, mk({{0.1}}))};
        c.plant.C2 = {term(0, mk({{1, 0}}))};
        c.plant.D21 = {term(0, mk({{0, 0.1}}))};
        c.rows.push_back({"nK=0 published", static_gain(mk({{-8.6961}})), 3.7654});
        c.rows.push_back({"nK=1 published", dyn_block(mk({{-7.1827, -37.3389}, {18.6767, 90.4893}}), 1), 1.2618});
        c.rows.push_back({"nK=2 published",
                          dyn_block(mk({{-2.6837, -15.1028, -6.2101},
                                        {0.3607, 1.2086, 3.6959},
                                        {0.1379, -3.9720, 10.4548}}), 2),
                          1.2428});
        c.note = "as transcribed, the algebraic row carries x2(t) - x2(t-1.2): the "
                 "difference part has unit spectral radius and no output feedback "
                 "through y = x1 + 0.1 w2 can damp it, so the closed loop is never "
                 "strongly stable and the published values are not reproducible "
                 "from these equations";
        reg.push_back(std::move(c));
    }
    for (double h : {0.999, 1.28}) {
        BenchCase c;
        c.name = h < 1.0 ? "c5_fridman_ex4_h0999" : "c5_fridman_ex4_h128";
        c.description = "retarded plant, scalar output feedback, delay h";
        c.plant.nG = 2; c.plant.nw = 2; c.plant.nu = 1; c.plant.ny = 1; c.plant.nz = 2;
        c.plant.A = {term(0, mk({{0, 0}, {0, 1}})), term(h, mk({{-1, -1}, {0, -0.9}}))};
        c.plant.B1 = {term(0, mk({{1, 0}, {1, 0}}))};
        c.plant.B2 = {term(0, mk({{0}, {1}}))};
        c.plant.C1 = {term(0, mk({{0, 1}, {0, 0}}))};
        c.plant.D12 = {term(0, mk({{0}, {0.1}}))};
        c.plant.C2 = {term(0, mk({{0, 1}}))};
        c.plant.D21 = {term(0, mk({{0, 0.1}}))};
        c.rows.push_back({"K published", static_gain(mk({{-16.1692}})), 0.1617});
        reg.push_back(std::move(c));
    }
    {
        BenchCase c;
        c.name = "c6_robust";
        c.description = "three-state plant with input delay 5, state feedback";
        c.plant.nG = 3; c.plant.nw = 1; c.plant.nu = 1; c.plant.ny = 3; c.plant.nz = 3;
        Mat A = mk({{-0.08, -0.03, 0.2}, {0.2, -0.04, -0.005}, {-0.06, 0.2, -0.07}});
        Mat B = mk({{-0.1}, {-0.2}, {0.1}});
        c.plant.A = {term(0, A)};
        c.plant.B1 = {term(0, B)};
        c.plant.B2 = {term(5.0, B)};
        c.plant.C1 = {term(0, Mat::Identity(3, 3))};
        c.plant.C2 = {term(0, Mat::Identity(3, 3))};
        c.rows.push_back({"K published", static_gain(mk({{0.7763, 1.1119, 0.5433}})), 3.3145});
        reg.push_back(std::move(c));
    }
    {
        BenchCase c;
        c.name = "c7_heat11";
        c.description = "11-state heat-transfer loop, static state feedback";
        c.plant = heat11_plant(false);
        Mat K(1, 11);
        K << -1.3414, -5.7544, 1.0440, 0.5181, -29.9649, -5.0182, -12.4284, 0.6694, 4.7125, -23.6380, 2.3902;
        c.rows.push_back({"K published", static_gain(K), 386.3491});
        c.opts.N = 8;  // slow dynamics; keeps the 23-state pencil small
        c.note = "source lists A0(6,6) twice (-0.0588 and -1) and omits the input "
                 "column entirely; primary reading: A0(6,6)=-0.0588, the duplicate "
                 "-1 taken as A0(11,11) (state 11 is otherwise an undamped "
                 "integrator), input entering state 5. No unit input column gives "
                 "a strongly stable loop under the published gains (this reading "
                 "has rightmost roots +0.516 +- 0.379j), so the published "
                 "386.3491 is not reproducible from the printed data";
        c.variants.push_back({"A0(6,6)=-1 literal duplicate", heat11_plant(true)});
        reg.push_back(std::move(c));
    }
    {
        BenchCase c;
        c.name = "c8_bfg_ex2";
        c.description = "four-state plant with three state delays and input delay 0.2";
        c.plant.nG = 4; c.plant.nw = 2; c.plant.nu = 1; c.plant.ny = 1; c.plant.nz = 2;
        c.plant.A = {
            term(0, mk({{-4.4656, -0.4271, 0.4427, -0.1854},
                        {-0.8601, -5.6257, 0.8577, -0.5210},
                        {0.9001, -0.7177, -6.5358, 0.0417},
                        {-0.6836, 0.0242, 0.4997, -3.5618}})),
            term(3.2, mk({{0.6848, -0.0618, 0.5399, 0.5057},
                          {0.3259, -0.3810, 0.6592, -0.0066},
                          {0.6325, 0.3752, 0.4122, 0.7303},
                          {0.5878, 0.9737, 0.1907, -0.8639}})),
            term(3.4, mk({{0.9371, -0.7859, 0.1332, 0.7429},
                          {-0.8025, 0.4483, 0.6226, 0.0152},
                          {0.0940, 0.2274, 0.1536, 0.5776},
                          {-0.1941, 0.5659, 0.8881, -0.0539}})),
            term(3.9, mk({{0.6576, -0.8543, -0.3460, 0.6415},
                          {-0.3550, 0.5024, 0.6081, 0.9038},
                          {0.9523, 0.6624, 0.0765, -0.8475},
                          {-0.4436, 0.8447, -0.0734, 0.4173}}))};
        c.plant.B1 = {term(0, mk({{1, 0}, {-1.6, 1}, {0, 0}, {0, 0}}))};
        c.plant.B2 = {term(0.2, mk({{0.2}, {-1}, {0.1}, {-0.4}}))};
        c.plant.C1 = {term(0, mk({{1, 0, 0, -1}, {0, -1, 1, 0}}))};
        c.plant.D11 = {term(0, mk({{0.1, 1}, {-1, 0.2}}))};
        c.plant.D12 = {term(0, mk({{1}, {-1}}))};
        c.plant.C2 = {term(0, mk({{1, 0, -1, 0}}))};
        c.plant.D21 = {term(0, mk({{-2, 0.1}}))};
        c.plant.D22 = {term(0.2, mk({{0.4}}))};
        c.rows.push_back({"open loop", static_gain(mk({{0.0}})), 1.3907});
        c.rows.push_back({"nK=1 published", dyn_block(mk({{-0.3068, 0.9590}, {0.0166, 0.0186}}), 1), 1.2513});
        c.rows.push_back({"nK=2 published",
                          dyn_block(mk({{-0.0959, -0.0624, -0.0982},
                                        {-0.0024, -0.1984, 0.0883},
                                        {-0.0756, 0.0347, 0.0234}}), 2),
                          1.2508});
        c.rows.push_back({"nK=3 published",
                          dyn_block(mk({{-0.0861, -0.0673, -0.0953, -0.0519},
                                        {0.0046, -0.2170, -0.0233, 0.1083},
                                        {-0.0016, 0.0010, -0.2973, 0.1995},
                                        {-0.1734, -0.1040, -0.0475, 0.0362}}), 3),
                          1.2493});
        reg.push_back(std::move(c));
    }
    return reg;
}

}  // namespace

const std::vector<BenchCase>& bench_registry() {
    static const std::vector<BenchCase> reg = make_registry();
    return reg;
}

const BenchCase* find_bench(const std::string& name) {
    for (const BenchCase& c : bench_registry())
        if (c.name == name) return &c;
    return nullptr;
}

}  // namespace ddae
