#![allow(clippy::excessive_precision)]

// Decomposition low-pass filters. Generated offline by spectral factorization
// of the Daubechies polynomial at 50 significant digits.
// dbN takes the minimum-phase roots; symN the root set with the least phase
// nonlinearity.

pub(super) const HAAR: [f64; 2] = [std::f64::consts::FRAC_1_SQRT_2; 2];

pub(super) const DB2: [f64; 4] = [
    -0.12940952255126038,
    0.22414386804201338,
    0.83651630373780791,
    0.48296291314453414,
];

pub(super) const DB3: [f64; 6] = [
    0.035226291885709537,
    -0.085441273882026662,
    -0.13501102001025459,
    0.45987750211849157,
    0.80689150931109258,
    0.33267055295008262,
];

pub(super) const DB4: [f64; 8] = [
    -0.010597401785069032,
    0.0328830116668852,
    0.030841381835560764,
    -0.18703481171909308,
    -0.027983769416859854,
    0.63088076792985891,
    0.71484657055291565,
    0.2303778133088965,
];

pub(super) const DB5: [f64; 10] = [
    0.0033357252854737713,
    -0.012580751999081999,
    -0.0062414902127982743,
    0.077571493840045714,
    -0.032244869584638375,
    -0.24229488706638203,
    0.13842814590132073,
    0.72430852843777293,
    0.60382926979718967,
    0.16010239797419291,
];

pub(super) const DB6: [f64; 12] = [
    -0.0010773010853084796,
    0.0047772575109455106,
    0.00055384220116149614,
    -0.03158203931748603,
    0.027522865530305729,
    0.097501605587323049,
    -0.12976686756726194,
    -0.22626469396543982,
    0.31525035170919763,
    0.75113390802109535,
    0.49462389039845309,
    0.11154074335010946,
];

pub(super) const DB7: [f64; 14] = [
    0.00035371379997452025,
    -0.0018016407040474909,
    0.00042957797292136652,
    0.012550998556099841,
    -0.016574541630666881,
    -0.038029936935014414,
    0.080612609151083072,
    0.071309219266830265,
    -0.22403618499387498,
    -0.14390600392856498,
    0.46978228740519312,
    0.72913209084623512,
    0.39653931948191731,
    0.077852054085009179,
];

pub(super) const DB8: [f64; 16] = [
    -0.00011747678412476953,
    0.00067544940645056937,
    -0.00039174037337694705,
    -0.0048703529934515743,
    0.0087460940474057767,
    0.013981027917398282,
    -0.044088253930794752,
    -0.017369301001807546,
    0.12874742662047846,
    0.00047248457391328277,
    -0.28401554296154693,
    -0.015829105256349306,
    0.58535468365420671,
    0.67563073629728981,
    0.31287159091429997,
    0.05441584224310401,
];

pub(super) const DB9: [f64; 18] = [
    0.000039347320316271599,
    -0.00025196318894271014,
    0.00023038576352319597,
    0.0018476468830562265,
    -0.0042815036824634298,
    -0.0047232047577513973,
    0.022361662123679097,
    0.00025094711483145196,
    -0.067632829061329974,
    0.030725681479333379,
    0.14854074933810638,
    -0.096840783222976461,
    -0.29327378327917491,
    0.13319738582500758,
    0.65728807805130054,
    0.60482312369011111,
    0.24383467461259035,
    0.038077947363878347,
];

pub(super) const DB10: [f64; 20] = [
    -0.000013264202894521245,
    0.000093588670320069591,
    -0.00011646685512928545,
    -0.00068585669495971163,
    0.0019924052951850561,
    0.0013953517470529012,
    -0.010733175483330575,
    0.0036065535669561697,
    0.033212674059341002,
    -0.029457536821875813,
    -0.071394147166397087,
    0.093057364603572351,
    0.12736934033579326,
    -0.19594627437737704,
    -0.24984642432731538,
    0.28117234366057746,
    0.68845903945360357,
    0.52720118893172559,
    0.18817680007769149,
    0.026670057900555554,
];

pub(super) const SYM2: [f64; 4] = [
    -0.12940952255126038,
    0.22414386804201338,
    0.83651630373780791,
    0.48296291314453414,
];

pub(super) const SYM3: [f64; 6] = [
    0.035226291885709537,
    -0.085441273882026662,
    -0.13501102001025459,
    0.45987750211849157,
    0.80689150931109258,
    0.33267055295008262,
];

pub(super) const SYM4: [f64; 8] = [
    -0.075765714789502213,
    -0.029635527646002492,
    0.49761866763277499,
    0.80373875180513208,
    0.29785779560530605,
    -0.099219543576633533,
    -0.012603967262031304,
    0.032223100604051468,
];

pub(super) const SYM5: [f64; 10] = [
    0.019538882735249827,
    -0.021101834024689041,
    -0.17532808990805622,
    0.016602105764510848,
    0.63397896345679206,
    0.72340769040404079,
    0.1993975339768556,
    -0.039134249302313844,
    0.029519490925706261,
    0.027333068344998769,
];

pub(super) const SYM6: [f64; 12] = [
    -0.0078007083250323804,
    0.0017677118642540077,
    0.044724901770781385,
    -0.021060292512370848,
    -0.072637522786376583,
    0.33792942172816583,
    0.787641141028651,
    0.49105594192797373,
    -0.048311742585698055,
    -0.11799011114852003,
    0.0034907120842221625,
    0.015404109327044824,
];

pub(super) const SYM7: [f64; 14] = [
    0.0022918339540537712,
    -0.0032832978474668107,
    -0.018126605131338461,
    0.020464207577546034,
    0.044742349468352377,
    -0.1010109208684203,
    -0.056804476889666969,
    0.4836109156822677,
    0.78192159329172812,
    0.3602184609062602,
    -0.064131289807385821,
    -0.064908003547188486,
    0.017213376300804503,
    0.012015419283549189,
];

pub(super) const SYM8: [f64; 16] = [
    -0.0033824159510050026,
    -0.00054213233180001069,
    0.031695087811525991,
    0.0076074873249766082,
    -0.14329423835127266,
    -0.061273359067811078,
    0.48135965125905339,
    0.77718575169962803,
    0.36444189483617894,
    -0.051945838107881801,
    -0.027219029917103486,
    0.049137179673730287,
    0.0038087520138944895,
    -0.014952258337062199,
    -0.00030292051472413308,
    0.0018899503327676892,
];
