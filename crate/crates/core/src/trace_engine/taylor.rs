// Generated by tools/taylor_coeffs.py; do not edit.
#![allow(clippy::excessive_precision)]
// Taylor coefficients at e = 0, degree 16.

pub(crate) const F_L_PLUS: [f64; 17] = [
    6.18192704155422348e+01,
    -2.39999999999999346e+02,
    6.44931387532215808e+02,
    -1.38794666666666194e+03,
    2.63161946569683960e+03,
    -4.54357745487527427e+03,
    7.33966014109852949e+03,
    -1.12433409709904918e+04,
    1.65242090613792352e+04,
    -2.34613160452021366e+04,
    3.23782700773718716e+04,
    -4.36095297773596612e+04,
    5.75328915087154310e+04,
    -7.45381040074755874e+04,
    9.50572666019034077e+04,
    -1.19535334254200090e+05,
    1.48458791457811603e+05,
];

pub(crate) const F_L_MINUS: [f64; 17] = [
    6.18192704155422064e+01,
    2.40000000000001421e+02,
    6.44931387532216604e+02,
    1.38794666666667581e+03,
    2.63161946569684596e+03,
    4.54357745487532429e+03,
    7.33966014109857588e+03,
    1.12433409709907737e+04,
    1.65242090613795444e+04,
    2.34613160452045595e+04,
    3.23782700773789511e+04,
    4.36095297773627535e+04,
    5.75328915087614296e+04,
    7.45381040074753837e+04,
    9.50572666016456496e+04,
    1.19535334255155452e+05,
    1.48458791465897433e+05,
];

pub(crate) const F_TILDE: [f64; 17] = [
    3.65712334475241278e+02,
    1.41511111111111745e+03,
    3.93787009854851931e+03,
    8.79217777777783704e+03,
    1.72435557862321293e+04,
    3.06590664272111462e+04,
    5.07875088328287820e+04,
    7.94981627128299297e+04,
    1.19026319105377785e+05,
    1.71740583275514480e+05,
    2.40364495638759428e+05,
    3.27764390812531346e+05,
    4.37153149009589048e+05,
    5.71893834424150060e+05,
    7.35689400590677047e+05,
    9.32398963090801029e+05,
    1.16621607099500042e+06,
];

pub(crate) const G_L_PLUS: [f64; 17] = [
    6.55203720659508662e+01,
    -1.52202937734422733e+02,
    6.08014674616800448e+02,
    -1.00007902792231198e+03,
    2.59710563149381414e+03,
    -3.60217951561476320e+03,
    7.58019771048759867e+03,
    -9.51089707626242671e+03,
    1.76909371055298579e+04,
    -2.07767647594063055e+04,
    3.56485359530973583e+04,
    -3.99485332524958794e+04,
    6.47575736531103175e+04,
    -7.00732365669308492e+04,
    1.08907929020203272e+05,
    -1.14696233011579388e+05,
    1.72574757632820169e+05,
];

pub(crate) const G_L_MINUS_CHECK: [f64; 17] = [
    6.18192704155424622e+01,
    7.12818601014787873e+02,
    1.20846849152689674e+03,
    4.34155563217297731e+03,
    6.05338159510958576e+03,
    1.48382470281799742e+04,
    1.92162904857303001e+04,
    3.80891132435055624e+04,
    4.75617820288463045e+04,
    8.20469765476136963e+04,
    1.00365439060111108e+05,
    1.56828938937632949e+05,
    1.89444968821014540e+05,
    2.74793354810137302e+05,
    3.29264068743479555e+05,
    4.50602324470256222e+05,
    5.37017315372755402e+05,
];

pub(crate) const G_TILDE_CHECK: [f64; 17] = [
    2.53359935793303885e+03,
    4.01342058035427385e+02,
    2.17524643814316769e+04,
    -2.49593489549303598e+02,
    9.06447740504472749e+04,
    -8.83249978132972319e+03,
    2.61932605514492403e+05,
    -3.98076195674697301e+04,
    6.09185526532229502e+05,
    -1.16556337153387256e+05,
    1.22759296522761439e+06,
    -2.72549958889515314e+05,
    2.23474790333217522e+06,
    -5.52367001441479195e+05,
    3.77137482153115189e+06,
    -1.01260478993163293e+06,
    6.00201349080493487e+06,
];

