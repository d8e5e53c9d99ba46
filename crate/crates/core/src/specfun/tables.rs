// Generated by tools/gen_bessel_tables.py. Do not edit by hand.

/// `1/(k!)^2`.
pub(crate) const INV_FACT_SQ: [f64; 44] = [
    1.0,
    1.0,
    0.25,
    0.027777777777777776,
    0.001736111111111111,
    6.944444444444444e-05,
    1.9290123456790124e-06,
    3.936759889140842e-08,
    6.151187326782565e-10,
    7.594058428126624e-12,
    7.594058428126623e-14,
    6.276081345559193e-16,
    4.358389823304995e-18,
    2.5789288895295828e-20,
    1.3157800456783586e-22,
    5.8479113141260385e-25,
    2.2843403570804838e-27,
    7.904291893012054e-30,
    2.4395962632753253e-32,
    6.757884385804225e-35,
    1.6894710964510564e-37,
    3.8310002187098785e-40,
    7.915289708078262e-43,
    1.4962740468957016e-45,
    2.5976979980828152e-48,
    4.156316796932504e-51,
    6.14839762859838e-54,
    8.434015951438106e-57,
    1.0757673407446564e-59,
    1.2791526049282477e-62,
    1.4212806721424974e-65,
    1.4789601166935458e-68,
    1.4442969889585408e-71,
    1.3262598613026087e-74,
    1.147283617043779e-77,
    9.365580547296156e-81,
    7.226528200074194e-84,
    5.278691161485898e-87,
    3.6556032974279072e-90,
    2.4034209713529963e-93,
    1.5021381070956227e-96,
    8.935979221270807e-100,
    5.065747857863269e-103,
    2.739723016691871e-106,
];

/// `1/(k!(k+1)!)`.
pub(crate) const INV_FACT_FACT1: [f64; 44] = [
    1.0,
    0.5,
    0.08333333333333333,
    0.006944444444444444,
    0.00034722222222222224,
    1.1574074074074073e-05,
    2.755731922398589e-07,
    4.920949861426052e-09,
    6.834652585313961e-11,
    7.594058428126623e-13,
    6.903689480115112e-15,
    5.230067787965994e-17,
    3.352607556388458e-19,
    1.842092063949702e-21,
    8.771866971189057e-24,
    3.654944571328774e-26,
    1.3437296218120491e-28,
    4.391273273895586e-31,
    1.2839980333028028e-33,
    3.3789421929021126e-36,
    8.045100459290744e-39,
    1.7413637357772174e-41,
    3.4414303078601135e-44,
    6.234475195398757e-47,
    1.0390791992331261e-49,
    1.5985833834355786e-52,
    2.2771843068882885e-55,
    3.0121485540850376e-58,
    3.7095425542919185e-61,
    4.263842016427493e-64,
    4.5847763617499917e-67,
    4.6217503646673306e-70,
    4.376657542298608e-73,
    3.900764297948849e-76,
    3.2779531915536543e-79,
    2.60155015202671e-82,
    1.9531157297497823e-85,
    1.3891292530226046e-88,
    9.373341788276685e-92,
    6.00855242838249e-95,
    3.6637514807210306e-98,
    2.127614100302573e-101,
    1.1780808971775045e-104,
    6.2266432197542515e-108,
];

/// Harmonic numbers `H_k`, `H_0 = 0`.
pub(crate) const HARMONIC: [f64; 44] = [
    0.0,
    1.0,
    1.5,
    1.8333333333333333,
    2.0833333333333335,
    2.283333333333333,
    2.45,
    2.592857142857143,
    2.717857142857143,
    2.828968253968254,
    2.9289682539682538,
    3.019877344877345,
    3.103210678210678,
    3.180133755133755,
    3.2515623265623264,
    3.3182289932289932,
    3.3807289932289932,
    3.4395525226407577,
    3.4951080781963135,
    3.547739657143682,
    3.597739657143682,
    3.6453587047627294,
    3.690813250217275,
    3.73429151108684,
    3.7759581777535067,
    3.8159581777535068,
    3.8544197162150455,
    3.8914567532520823,
    3.927171038966368,
    3.961653797587058,
    3.994987130920391,
    4.02724519543652,
    4.05849519543652,
    4.08879822573955,
    4.118209990445433,
    4.146781419016861,
    4.174559196794639,
    4.201586223821666,
    4.22790201329535,
    4.253543038936376,
    4.278543038936376,
    4.302933282838815,
    4.326742806648339,
    4.349998620601827,
];

/// Hankel expansion coefficients `a_k(0)` (without the `x^-k`).
pub(crate) const HANKEL_A0: [f64; 40] = [
    1.0,
    -0.125,
    0.0703125,
    -0.0732421875,
    0.112152099609375,
    -0.22710800170898438,
    0.5725014209747314,
    -1.7277275025844574,
    6.074042001273483,
    -24.380529699556064,
    110.01714026924674,
    -551.3358961220206,
    3038.090510922384,
    -18257.755474293175,
    118838.42625678325,
    -832859.3040162893,
    6252951.493434797,
    -50069589.531988926,
    425939216.5047669,
    -3836255180.2304335,
    36468400807.06556,
    -364901081884.98334,
    3833534661393.9443,
    -42189715702840.97,
    485401468685290.06,
    -5827244631566907.0,
    7.286857349377656e+16,
    -9.47628809926011e+17,
    1.2797219419759747e+19,
    -1.792162323051699e+20,
    2.599382102726235e+21,
    -3.900121292034e+22,
    6.046711487532402e+23,
    -9.677028801069846e+24,
    1.597065525294211e+26,
    -2.715581773544907e+27,
    4.753211014041623e+28,
    -8.557385639806693e+29,
    1.583397836312916e+31,
    -3.0089633883010508e+32,
];

/// Hankel expansion coefficients `a_k(1)`.
pub(crate) const HANKEL_A1: [f64; 40] = [
    1.0,
    0.375,
    -0.1171875,
    0.1025390625,
    -0.144195556640625,
    0.2775764465332031,
    -0.6765925884246826,
    1.993531733751297,
    -6.883914268109947,
    27.248827311268542,
    -121.59789187653587,
    603.8440767050702,
    -3302.2722944808525,
    19718.37591223663,
    -127641.2726461746,
    890297.8767070678,
    -6656367.718817688,
    53104110.10968523,
    -450278600.3050393,
    4043620325.107754,
    -38338575207.427895,
    382701134659.8606,
    -4011838599133.1978,
    44064814178522.79,
    -506056850331472.6,
    6065091351222699.0,
    -7.572616461117957e+16,
    9.83388387659068e+17,
    -1.3262572853205555e+19,
    1.8550452115798288e+20,
    -2.687496750276277e+21,
    4.027994121281017e+22,
    -6.2386705823747e+23,
    9.974783533410458e+24,
    -1.6447391230641874e+26,
    2.7942942887201215e+27,
    -4.887104282042795e+28,
    8.791834561445232e+29,
    -1.6256217786145938e+31,
    3.0871182815036758e+32,
];
