//! Bessel values against a 40-digit reference table.

#![allow(clippy::excessive_precision)]

use triavg::special::{bessel_j, gamma, sphere_ft, BesselOrder};

const TABLE: &[(f64, f64, f64)] = &[
    (0.0, 0.1, 9.9750156206604003228e-1),
    (0.0, 1.0, 7.6519768655796655145e-1),
    (0.0, 5.0, -1.7759677131433830435e-1),
    (0.0, 11.9, 2.5049441699589563728e-2),
    (0.0, 12.0, 4.7689310796833536624e-2),
    (0.0, 12.1, 6.9666773606807388498e-2),
    (0.0, 20.0, 1.6702466434058315473e-1),
    (0.0, 50.0, 5.5812327669251815005e-2),
    (0.0, 137.25, -1.3235947339110896357e-2),
    (0.0, 1000.0, 2.4786686152420174561e-2),
    (0.0, 9999.5, -4.4787274031284250473e-3),
    (0.5, 0.1, 2.5189294032600094573e-1),
    (0.5, 1.0, 6.7139670714180309042e-1),
    (0.5, 5.0, -3.4216798479816180976e-1),
    (0.5, 11.9, -1.4297213406708074617e-1),
    (0.5, 12.0, -1.2358853595594194375e-1),
    (0.5, 12.1, -1.0313819465555987942e-1),
    (0.5, 20.0, 1.6288076385502987091e-1),
    (0.5, 50.0, -2.9605831888924612568e-2),
    (0.5, 137.25, -5.656457172980214813e-2),
    (0.5, 1000.0, 2.086326660509382773e-2),
    (0.5, 9999.5, 1.5023404238838696029e-3),
    (1.0, 0.1, 4.9937526036241997556e-2),
    (1.0, 1.0, 4.4005058574493351596e-1),
    (1.0, 5.0, -3.2757913759146522204e-1),
    (1.0, 11.9, -2.2898324966192407078e-1),
    (1.0, 12.0, -2.2344710449062761237e-1),
    (1.0, 12.1, -2.1574897337692477718e-1),
    (1.0, 20.0, 6.6833124175850045579e-2),
    (1.0, 50.0, -9.7511828125175137661e-2),
    (1.0, 137.25, -6.6855654284548069317e-2),
    (1.0, 1000.0, 4.7283119070895239176e-3),
    (1.0, 9999.5, 6.6032722001328390992e-3),
    (1.5, 0.1, 8.4020343015001428999e-3),
    (1.5, 1.0, 2.402978391234270109e-1),
    (1.5, 5.0, -1.6965130614474076152e-1),
    (1.5, 11.9, -1.9382873495825973541e-1),
    (1.5, 12.0, -2.0466344849652968759e-1),
    (1.5, 12.1, -2.1340358035979597602e-1),
    (1.5, 20.0, -6.4662866592310355005e-2),
    (1.5, 50.0, -1.0947687298831803539e-1),
    (1.5, 137.25, -3.8344233849423900611e-2),
    (1.5, 1000.0, -1.4168706104322200496e-2),
    (1.5, 9999.5, 7.8364844448377403512e-3),
    (2.0, 0.1, 1.2489586587999188454e-3),
    (2.0, 1.0, 1.1490348493190048047e-1),
    (2.0, 5.0, 4.6565116277752215532e-2),
    (2.0, 11.9, -6.3534021474702852935e-2),
    (2.0, 12.0, -8.4930494878604805352e-2),
    (2.0, 12.1, -1.0532776094183627729e-1),
    (2.0, 20.0, -1.6034135192299815017e-1),
    (2.0, 50.0, -5.9712800794258820511e-2),
    (2.0, 137.25, 1.2261730154636607551e-2),
    (2.0, 1000.0, -2.4777229528605995513e-2),
    (2.0, 9999.5, 4.4800481236044754177e-3),
    (2.5, 0.1, 1.6808871900334127033e-4),
    (2.5, 1.0, 4.9496810228477942271e-2),
    (2.5, 5.0, 2.4037720111131735285e-1),
    (2.5, 11.9, 9.4107747102813585977e-2),
    (2.5, 12.0, 7.2422673831809521857e-2),
    (2.5, 12.1, 5.0228216053957571318e-2),
    (2.5, 20.0, -1.7258019384387642416e-1),
    (2.5, 50.0, 2.3037219509625530445e-2),
    (2.5, 137.25, 5.5726446399760095657e-2),
    (2.5, 1000.0, -2.0905772723406794331e-2),
    (2.5, 9999.5, -1.499989360997273951e-3),
    (0.3, 0.1, 4.527257459945965856e-1),
    (0.3, 1.0, 7.4022247928102045053e-1),
    (0.3, 5.0, -2.9682911012576076084e-1),
    (0.3, 11.9, -8.122067438924171553e-2),
    (0.3, 12.0, -5.8942057108976807179e-2),
    (0.3, 12.1, -3.6262204172314017489e-2),
    (0.3, 20.0, 1.7731275838228064675e-1),
    (0.3, 50.0, 5.3100391078477326775e-3),
    (0.3, 137.25, -4.2105557827626754698e-2),
    (0.3, 1000.0, 2.4226398849887748739e-2),
    (0.3, 9999.5, -9.9268645262884045357e-4),
    (1.7, 0.1, 3.9719764552031059356e-3),
    (1.7, 1.0, 1.8141766505664451685e-1),
    (1.7, 5.0, -8.5089767345250386562e-2),
    (1.7, 11.9, -1.4987203141598332855e-1),
    (1.7, 12.0, -1.6599459201170789839e-1),
    (1.7, 12.1, -1.803647770509920662e-1),
    (1.7, 20.0, -1.1077234771958567197e-1),
    (1.7, 50.0, -9.6030564062553749358e-2),
    (1.7, 137.25, -1.9226073242174376873e-2),
    (1.7, 1000.0, -1.9921778466774372234e-2),
    (1.7, 9999.5, 6.9890562452196330282e-3),
    (3.2, 0.1, 8.8464511045766665625e-6),
    (3.2, 1.0, 1.3213773612850163589e-2),
    (3.2, 5.0, 3.9195960842034329995e-1),
    (3.2, 11.9, 2.2954801741194649302e-1),
    (3.2, 12.0, 2.2240587691358739229e-1),
    (3.2, 12.1, 2.1326727661025055018e-1),
    (3.2, 20.0, -5.3201568919917871562e-2),
    (3.2, 50.0, 1.0771509103469677533e-1),
    (3.2, 137.25, 6.0653426622140128172e-2),
    (3.2, 1000.0, 3.0462115517529526838e-3),
    (3.2, 9999.5, -7.6631639569074573959e-3),
    (4.0, 0.1, 2.6028648545684032338e-7),
    (4.0, 1.0, 2.4766389641099550438e-3),
    (4.0, 5.0, 3.9123236045864817782e-1),
    (4.0, 11.9, 1.6822004301603828252e-1),
    (4.0, 12.0, 1.8249896464415114398e-1),
    (4.0, 12.1, 1.9504505623970300885e-1),
    (4.0, 20.0, 1.3067093355486324749e-1),
    (4.0, 50.0, 7.0840977281654952354e-2),
    (4.0, 137.25, -9.3234565416340434635e-3),
    (4.0, 1000.0, 2.4748265003654771826e-2),
    (4.0, 9999.5, -4.484009209713547644e-3),
    (4.5, 0.1, 2.6687681101905798548e-8),
    (4.5, 1.0, 8.0667390426096094871e-4),
    (4.5, 5.0, 3.3366270904716400726e-1),
    (4.5, 11.9, 4.3168608879260501086e-2),
    (4.5, 12.0, 6.4567071014175388022e-2),
    (4.5, 12.1, 8.5235692274457387803e-2),
    (4.5, 20.0, 1.801114301898458613e-1),
    (4.5, 50.0, -7.3879362181262480642e-3),
    (4.5, 137.25, -5.3667281457649054706e-2),
    (4.5, 1000.0, 2.1004221964091730497e-2),
    (4.5, 9999.5, 1.4945030225464375155e-3),
    (7.0, 0.1, 1.5496148676202273765e-13),
    (7.0, 1.0, 1.5023258174368082122e-6),
    (7.0, 5.0, 5.3376410155890715431e-2),
    (7.0, 11.9, -1.5520692222578964657e-1),
    (7.0, 12.0, -1.702538041272080471e-1),
    (7.0, 12.1, -1.8405775848281576962e-1),
    (7.0, 20.0, -1.8422139772059443072e-1),
    (7.0, 50.0, 6.0491201259537108376e-2),
    (7.0, 137.25, 6.8139992624290667352e-2),
    (7.0, 1000.0, -5.3217830764436153538e-3),
    (7.0, 9999.5, -6.5925037061721333725e-3),
    (10.3, 0.1, 5.3862133898865594029e-21),
    (10.3, 1.0, 1.0513872195855693293e-10),
    (10.3, 5.0, 9.6569337118360534355e-4),
    (10.3, 11.9, 2.985535570285556509e-1),
    (10.3, 12.0, 2.9965644392549728151e-1),
    (10.3, 12.1, 2.999647685601066622e-1),
    (10.3, 20.0, 1.6483861226184076901e-1),
    (10.3, 50.0, -1.0219915521718104534e-1),
    (10.3, 137.25, 1.8859293882518487282e-2),
    (10.3, 1000.0, -2.4566505069934379229e-2),
    (10.3, 9999.5, 1.0346350711824490548e-3),
];

#[test]
fn bessel_matches_reference() {
    let mut failures = Vec::new();
    for &(nu, t, expect) in TABLE {
        let got = bessel_j(BesselOrder::new(nu).unwrap(), t).unwrap();
        let err = (got - expect).abs();
        let scale = expect.abs().max(1e-3 / t.sqrt().max(1.0));
        if err > 1e-10 * scale {
            failures.push(format!(
                "J_{nu}({t}) = {got:e}, want {expect:e}, rel {:e}",
                err / scale
            ));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn gamma_matches_reference() {
    let cases = [
        (0.5, 1.7724538509055160273),
        (1.0, 1.0),
        (2.5, 1.3293403881791370205),
        (7.3, 1271.4236336639092731),
        (20.2, 220574282641236857.08),
        (171.5, 9.4833675668247993363e307),
    ];
    for (x, g) in cases {
        let tol = if x < 100.0 { 1e-14 } else { 5e-13 };
        assert!((gamma(x) / g - 1.0).abs() < tol, "gamma({x})");
    }
}

#[test]
fn sphere_transform_reference() {
    // σ̂₃(1/2) = 2 J₁(π)/π.
    assert!((sphere_ft(3, 0.5).unwrap() - 0.1811917549874152455).abs() < 1e-14);
    assert!(
        (bessel_j(BesselOrder::new(1.0).unwrap(), 1.0).unwrap() - 0.44005058574493351596).abs()
            < 1e-15
    );
}
