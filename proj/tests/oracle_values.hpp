#pragma once

// Generated by tools/oracles.py (mpmath, 40 digits).

namespace oracle {

inline constexpr double b_x2[48] = {
    0.28267274151216444761,
    -0.18012654869748937146,
    0.037995443865876664291,
    -0.014410123895799149716,
    0.0070361933084956785725,
    -0.003970136175373235126,
    0.0024626676579734875004,
    -0.0016338008952153230971,
    0.0011398633159762999287,
    -0.00082702731266064908841,
    0.00061918501114761971438,
    -0.00047566304609831415026,
    0.00037334903269568906711,
    -0.00029843451855205339649,
    0.00024231788179768280798,
    -0.00019944808160275639746,
    0.00016613234200614796629,
    -0.00013984846442021527176,
    0.00011883348698792701589,
    -0.00010182969568516556699,
    0.000087923341177235256212,
    -0.000076439644908467384978,
    0.000066872911609669672383,
    -0.000058839069215361367462,
    0.000052042849914908865181,
    -0.000046254718677873813905,
    0.000041294408259013401597,
    -0.000037019005618896539986,
    0.000033314221378999947527,
    -0.000030087916340317650122,
    0.000027265249070420754468,
    -0.000024785001669746819715,
    0.000022596771330268344897,
    -0.00002065880470809458131,
    0.000018936314171268646677,
    -0.000017400158548020022466,
    0.000016025801933785171264,
    -0.000014792486310364746252,
    0.000013682569813196582709,
    -0.000012680994244584575359,
    0.00001177485410809480904,
    -0.000010953045894166466239,
    0.000010205981186214005013,
    -0.0000095253508114771135678,
    0.0000089039300409028412313,
    -0.0000083354169710623319621,
    0.0000078142978615145768645,
    -0.0000073357344728397467244,
};
inline constexpr double b_x[12] = {
    0.5,
    -0.18012654869748937146,
    2.7369110631344083416e-48,
    -0.014410123895799149716,
    -2.0526832973508062562e-48,
    -0.003970136175373235126,
    -6.8422776578360208541e-49,
    -0.0016338008952153230971,
    -1.1973985901213036495e-48,
    -0.00082702731266064908841,
    6.8422776578360208541e-49,
    -0.00047566304609831415026,
};
// mu(x) = 1 + 2x - 3x^3
inline constexpr double b_cubic[8] = {
    1.4779726631952599857,
    0.085303669354947066358,
    -0.17097949739644498931,
    0.03205397153750798747,
    -0.031662869888230553576,
    0.0094879454587176374828,
    -0.011082004460880693752,
    0.0039869057606229490659,
};
inline constexpr double bump_integral = 0.44399381616807943782;
// w0 = 3 pi^2, T = 1
inline constexpr double sin_moment[2] = {0.01596122982015411503, 0.49615627018087181389};
// int_0^1 t e^{i w t} dt for w = 8 pi^2
inline constexpr double linear_moment[2] = {-0.0054369137888634879385, 0.011514780417871907691};
// a = 7, T = 1
inline constexpr double u2_sin7 = 0.12944925308737165122;
// t = 0.37
inline constexpr double duhamel_mode1[2] = {-0.049476930441863614895, -0.18974072678035293675};

}  // namespace oracle

