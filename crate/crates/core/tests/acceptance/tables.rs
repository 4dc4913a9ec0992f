//! High-precision reference values for the numerics criterion.
//!
//! Both tables were generated offline with mpmath at 50 decimal digits and
//! rounded to the nearest f64; the abscissas are exactly representable
//! (multiples of 1/8 and 1/4), so each row pins the correctly rounded
//! function value at one exact double-precision input.

/// Φ(x) at x = k/8, k ∈ [−64, 64], evaluated at 50-digit precision
/// with mpmath (`erfc(-x/sqrt(2))/2`) and rounded to f64.
pub const CDF_TABLE: [(f64, f64); 129] = [
    (-8.0, 6.220960574271784123516e-16),
    (-7.875, 1.703714291632873207544e-15),
    (-7.75, 4.594627435778595460155e-15),
    (-7.625, 1.220171931789923475910e-14),
    (-7.5, 3.190891672910896227767e-14),
    (-7.375, 8.217252607584337251266e-14),
    (-7.25, 2.083858158672069431190e-13),
    (-7.125, 5.204034400316781492953e-13),
    (-7.0, 1.279812543885835004384e-12),
    (-6.875, 3.099492951757215430598e-12),
    (-6.75, 7.392257778017822419516e-12),
    (-6.625, 1.736240895352056875147e-11),
    (-6.5, 4.016000583859117808346e-11),
    (-6.375, 9.148147583608610171786e-11),
    (-6.25, 2.052263425218938881623e-10),
    (-6.125, 4.534180326695284488921e-10),
    (-6.0, 9.865876450376981407009e-10),
    (-5.875, 2.114216742440847101368e-9),
    (-5.75, 4.462172453901611873069e-9),
    (-5.625, 9.275398734560821395659e-9),
    (-5.5, 1.898956246588771938385e-8),
    (-5.375, 3.829134106124428418601e-8),
    (-5.25, 7.604960516488714251146e-8),
    (-5.125, 1.487688731877662850056e-7),
    (-5.0, 2.866515718791939116738e-7),
    (-4.875, 5.440422755749163211343e-7),
    (-4.75, 0.000001017083242568703171259),
    (-4.625, 0.000001872992005556709486145),
    (-4.5, 0.000003397673124730060401687),
    (-4.375, 0.000006071623911330598909038),
    (-4.25, 0.00001068852577493442046920),
    (-4.125, 0.00001853673784620199305975),
    (-4.0, 0.00003167124183311992125377),
    (-3.875, 0.00005331234975109634508615),
    (-3.75, 0.00008841728520080386781775),
    (-3.625, 0.0001444807258812357674408),
    (-3.5, 0.0002326290790355250363499),
    (-3.375, 0.0003690784542750673086664),
    (-3.25, 0.0005770250423907670429169),
    (-3.125, 0.0008890252991084320593332),
    (-3.0, 0.001349898031630094526652),
    (-2.875, 0.002020137489946001680981),
    (-2.75, 0.002979763235054556754294),
    (-2.625, 0.004332448363012558626040),
    (-2.5, 0.006209665325776135166978),
    (-2.375, 0.008774475095738361685997),
    (-2.25, 0.01222447265504470315262),
    (-2.125, 0.01679330644844881258992),
    (-2.0, 0.02275013194817920720028),
    (-1.875, 0.03039636176526137505060),
    (-1.75, 0.04005915686381709041876),
    (-1.625, 0.05208127941521954773256),
    (-1.5, 0.06680720126885806600449),
    (-1.375, 0.08456572235133571994640),
    (-1.25, 0.1056497736668552576888),
    (-1.125, 0.1302945171368088546129),
    (-1.0, 0.1586552539314570514148),
    (-0.875, 0.1907869528525106256151),
    (-0.75, 0.2266273523768681993271),
    (-0.625, 0.2659855290487005323103),
    (-0.5, 0.3085375387259868963623),
    (-0.375, 0.3538302333272762056268),
    (-0.25, 0.4012936743170762757591),
    (-0.125, 0.4502617751698871070207),
    (0.0, 0.5000000000000000000000),
    (0.125, 0.5497382248301128929793),
    (0.25, 0.5987063256829237242409),
    (0.375, 0.6461697666727237943732),
    (0.5, 0.6914624612740131036377),
    (0.625, 0.7340144709512994676897),
    (0.75, 0.7733726476231318006729),
    (0.875, 0.8092130471474893743849),
    (1.0, 0.8413447460685429485852),
    (1.125, 0.8697054828631911453871),
    (1.25, 0.8943502263331447423112),
    (1.375, 0.9154342776486642800536),
    (1.5, 0.9331927987311419339955),
    (1.625, 0.9479187205847804522674),
    (1.75, 0.9599408431361829095812),
    (1.875, 0.9696036382347386249494),
    (2.0, 0.9772498680518207927997),
    (2.125, 0.9832066935515511874101),
    (2.25, 0.9877755273449552968474),
    (2.375, 0.9912255249042616383140),
    (2.5, 0.9937903346742238648330),
    (2.625, 0.9956675516369874413740),
    (2.75, 0.9970202367649454432457),
    (2.875, 0.9979798625100539983190),
    (3.0, 0.9986501019683699054733),
    (3.125, 0.9991109747008915679407),
    (3.25, 0.9994229749576092329571),
    (3.375, 0.9996309215457249326913),
    (3.5, 0.9997673709209644749637),
    (3.625, 0.9998555192741187642326),
    (3.75, 0.9999115827147991961322),
    (3.875, 0.9999466876502489036549),
    (4.0, 0.9999683287581668800787),
    (4.125, 0.9999814632621537980069),
    (4.25, 0.9999893114742250655795),
    (4.375, 0.9999939283760886694011),
    (4.5, 0.9999966023268752699396),
    (4.625, 0.9999981270079944432905),
    (4.75, 0.9999989829167574312968),
    (4.875, 0.9999994559577244250837),
    (5.0, 0.9999997133484281208061),
    (5.125, 0.9999998512311268122337),
    (5.25, 0.9999999239503948351129),
    (5.375, 0.9999999617086589387557),
    (5.5, 0.9999999810104375341123),
    (5.625, 0.9999999907246012654392),
    (5.75, 0.9999999955378275460984),
    (5.875, 0.9999999978857832575592),
    (6.0, 0.9999999990134123549623),
    (6.125, 0.9999999995465819673305),
    (6.25, 0.9999999997947736574781),
    (6.375, 0.9999999999085185241639),
    (6.5, 0.9999999999598399941614),
    (6.625, 0.9999999999826375910465),
    (6.75, 0.9999999999926077422220),
    (6.875, 0.9999999999969005070482),
    (7.0, 0.9999999999987201874561),
    (7.125, 0.9999999999994795965600),
    (7.25, 0.9999999999997916141841),
    (7.375, 0.9999999999999178274739),
    (7.5, 0.9999999999999680910833),
    (7.625, 0.9999999999999877982807),
    (7.75, 0.9999999999999954053726),
    (7.875, 0.9999999999999982962857),
    (8.0, 0.9999999999999993779039),
];

/// φ(z)/Φ(z) at z = k/4, k ∈ [−160, 32], same 50-digit pipeline.
pub const INV_MILLS_TABLE: [(f64, f64); 193] = [
    (-40.0, 40.02496884720726372324),
    (-39.75, 39.77512548966264667855),
    (-39.5, 39.52528410740758304881),
    (-39.25, 39.27544473799390182794),
    (-39.0, 39.02560741993010845641),
    (-38.75, 38.77577219271200521513),
    (-38.5, 38.52593909685449369647),
    (-38.25, 38.27610817392461286299),
    (-38.0, 38.02627946657586898752),
    (-37.75, 37.77645301858391671400),
    (-37.5, 37.52662887488365359938),
    (-37.25, 37.27680708160779380317),
    (-37.0, 37.02698768612699009603),
    (-36.75, 36.77717073709157707492),
    (-36.5, 36.52735628447501241457),
    (-36.25, 36.27754437961909716791),
    (-36.0, 36.02773507528106056921),
    (-35.75, 35.77792842568259950933),
    (-35.5, 35.52812448656096786330),
    (-35.25, 35.27832331522221617553),
    (-35.0, 35.02852497059668787028),
    (-34.75, 34.77872951329688417852),
    (-34.5, 34.52893700567781638154),
    (-34.25, 34.27914751189997079596),
    (-34.0, 34.02936109799501919273),
    (-33.75, 33.77957783193441508728),
    (-33.5, 33.52979778370102459371),
    (-33.25, 33.28002102536394934089),
    (-33.0, 33.03024763115670834319),
    (-32.75, 32.78047767755895574711),
    (-32.5, 32.53071124338192208573),
    (-32.25, 32.28094840985777811720),
    (-32.0, 32.03118926073313255721),
    (-31.75, 31.78143388236688810010),
    (-31.5, 31.53168236383269412466),
    (-31.25, 31.28193479702624947042),
    (-31.0, 31.03219127677772472675),
    (-30.75, 30.78245190096959068497),
    (-30.5, 30.53271677066015805491),
    (-30.25, 30.28298599021315334287),
    (-30.0, 30.03325966743367703707),
    (-29.75, 29.78353791371091306828),
    (-29.5, 29.53382084416798303805),
    (-29.25, 29.28410857781936507674),
    (-29.0, 29.03440123773632556298),
    (-28.75, 28.78469895122084247608),
    (-28.5, 28.53500184998853204680),
    (-28.25, 28.28531007036112582547),
    (-28.0, 28.03562375346908351918),
    (-27.75, 27.78594304546496820791),
    (-27.5, 27.53626809774825509940),
    (-27.25, 27.28659906720229311747),
    (-27.0, 27.03693611644419066256),
    (-26.75, 26.78727941408845318959),
    (-26.5, 26.53762913502526120846),
    (-26.25, 26.28798546071434335612),
    (-26.0, 26.03834857949547079029),
    (-25.75, 25.78871868691667683642),
    (-25.5, 25.53909598608139015930),
    (-25.25, 25.28948068801576136583),
    (-25.0, 25.03987301205756258318),
    (-24.75, 24.79027318626814797725),
    (-24.5, 24.54068144786908124585),
    (-24.25, 24.29109804370516480104),
    (-24.0, 24.04152323073574570995),
    (-23.75, 23.79195727655632667999),
    (-23.5, 23.54240045995267776907),
    (-23.25, 23.29285307148982754334),
    (-23.0, 23.04331541413851272840),
    (-22.75, 22.79378780394188483178),
    (-22.5, 22.54427057072551279149),
    (-22.25, 22.29476405885398470920),
    (-22.0, 22.04526862803770170653),
    (-21.75, 21.79578465419377576047),
    (-21.5, 21.54631253036529423529),
    (-21.25, 21.29685266770360033767),
    (-21.0, 21.04740549651866493017),
    (-20.75, 20.79797146740309560787),
    (-20.5, 20.54855105243584881575),
    (-20.25, 20.29914474647228586373),
    (-20.0, 20.04975306852785054221),
    (-19.75, 19.80037656326335207348),
    (-19.5, 19.55101580258062076416),
    (-19.25, 19.30167138733817449191),
    (-19.0, 19.05234394919750290551),
    (-18.75, 18.80303415261165527663),
    (-18.5, 18.55374269696902136606),
    (-18.25, 18.30447031890653849320),
    (-18.0, 18.05521779480806055154),
    (-17.75, 17.80598594350530696748),
    (-17.5, 17.55677562920069559984),
    (-17.25, 17.30758776463348092657),
    (-17.0, 17.05842331451299931030),
    (-16.75, 16.80928329924550324539),
    (-16.5, 16.56016879898408846145),
    (-16.25, 16.31108095803463036855),
    (-16.0, 16.06202098965450605436),
    (-15.75, 15.81299018128525040068),
    (-15.5, 15.56398990026525601842),
    (-15.25, 15.31502160007426526462),
    (-15.0, 15.06608682716782203504),
    (-14.75, 14.81718722846717222579),
    (-14.5, 14.56832455957846634459),
    (-14.25, 14.31950069382469194272),
    (-14.0, 14.07071763218474283400),
    (-13.75, 13.82197751424664691111),
    (-13.5, 13.57328263029649698630),
    (-13.25, 13.32463543468138178160),
    (-13.0, 13.07603856060397945311),
    (-12.75, 12.82749483652890880572),
    (-12.5, 12.57900730440697608912),
    (-12.25, 12.33057923995375632061),
    (-12.0, 12.08221417525428432982),
    (-11.75, 11.83391592400693539916),
    (-11.5, 11.58568860976797244862),
    (-11.25, 11.33753669761508343785),
    (-11.0, 11.08946502971517239248),
    (-10.75, 10.84147886536069541008),
    (-10.5, 10.59358392613237825452),
    (-10.25, 10.34578644695718033582),
    (-10.0, 10.09809323396251196284),
    (-9.75, 9.850511730185426064300),
    (-9.5, 9.603050090384282092315),
    (-9.25, 9.355717266426998541802),
    (-9.0, 9.108523105002868797781),
    (-8.75, 8.861478459734443375620),
    (-8.5, 8.614595320165172874130),
    (-8.25, 8.367886960583589882904),
    (-8.0, 8.121368112236112680654),
    (-7.75, 7.875055163203605819952),
    (-7.5, 7.628966391103765916666),
    (-7.25, 7.383122234872753513858),
    (-7.0, 7.137545613226503276494),
    (-6.75, 6.892262299069678960026),
    (-6.5, 6.647301361190490691266),
    (-6.25, 6.402695687156749784472),
    (-6.0, 6.158482604544598917278),
    (-5.75, 5.914704621653260293092),
    (-5.5, 5.671410313897305622750),
    (-5.25, 5.428655388386098285199),
    (-5.0, 5.186503967125842115617),
    (-4.75, 4.945030139214692738582),
    (-4.5, 4.704319844827732403970),
    (-4.25, 4.464473169266200651086),
    (-4.0, 4.225607144489471072751),
    (-3.75, 3.987859178967866326818),
    (-3.5, 3.751391264857699731315),
    (-3.25, 3.516395144468749855963),
    (-3.0, 3.283098654930436506928),
    (-2.75, 3.051773508248066532240),
    (-2.5, 2.822744797663907250474),
    (-2.25, 2.596402538686962146988),
    (-2.0, 2.373215532822840867299),
    (-1.75, 2.153747746609224679115),
    (-1.5, 1.938677166622543189452),
    (-1.25, 1.728816627331053967107),
    (-1.0, 1.525135276160981209089),
    (-0.75, 1.328777965221207040681),
    (-0.5, 1.141077770368064480884),
    (-0.25, 0.9635539794164039068679),
    (0.0, 0.7978845608028653558799),
    (0.25, 0.6458393710168172658357),
    (0.5, 0.5091604338370334858272),
    (0.75, 0.3893820567359270242824),
    (1.0, 0.2875999709391783612287),
    (1.25, 0.2042254588986767551986),
    (1.5, 0.1387897504588507562023),
    (1.75, 0.08987774553340023009973),
    (2.0, 0.05524786267898995910230),
    (2.25, 0.03213245414267401210135),
    (2.5, 0.01763782548691673478796),
    (2.75, 0.009120740147759833587769),
    (3.0, 0.004437839042125663793302),
    (3.25, 0.002030219544818679347877),
    (3.5, 0.0008728857536547359970183),
    (3.75, 0.0003526268606771553464843),
    (4.0, 0.0001338344644685751421128),
    (4.25, 0.00004771914658853321485093),
    (4.5, 0.00001598379541461758586416),
    (4.75, 0.000005029512404025229772229),
    (5.0, 0.000001486719940904905712442),
    (5.25, 4.128471302598610864702e-7),
    (5.5, 1.076976024705631131289e-7),
    (5.75, 2.639243215347331705675e-8),
    (6.0, 6.075882855817676445242e-9),
    (6.25, 1.314001818425551673029e-9),
    (6.5, 2.669556614870061325942e-10),
    (6.75, 5.094937958881346419388e-11),
    (7.0, 9.134720408376284072632e-12),
    (7.25, 1.538537950561595635743e-12),
    (7.5, 2.434320533029087502406e-13),
    (7.75, 3.618294451112533823697e-14),
    (8.0, 5.052271083536895430948e-15),
];
