//! Published reduction-table rows: (location, before-mean km, after-mean
//! km, group reduction %, rank). The country row carries no rank.

pub type Row = (&'static str, f64, f64, f64, u32);

pub const STATE_ROWS: [Row; 53] = [
    ("AK", 109.76, 25.47, 76.8, 1),
    ("AL", 48.04, 22.57, 53.03, 47),
    ("AR", 50.54, 23.15, 54.19, 45),
    ("AZ", 62.85, 23.47, 62.66, 26),
    ("CA", 78.58, 29.6, 62.33, 29),
    ("CO", 72.23, 24.47, 66.12, 12),
    ("CT", 45.51, 14.89, 67.28, 8),
    ("DC", 77.67, 19.74, 74.58, 2),
    ("DE", 43.63, 13.61, 68.81, 7),
    ("FL", 76.99, 32.24, 58.13, 42),
    ("GA", 65.64, 27.11, 58.7, 39),
    ("HI", 147.61, 70.75, 52.07, 51),
    ("IA", 50.42, 20.59, 59.17, 37),
    ("ID", 70.77, 33.36, 52.86, 49),
    ("IL", 55.59, 19.38, 65.15, 16),
    ("IN", 45.86, 17.15, 62.6, 27),
    ("KS", 65.5, 23.19, 64.6, 19),
    ("KY", 44.67, 15.31, 65.74, 13),
    ("LA", 45.98, 19.39, 57.83, 43),
    ("MA", 58.69, 17.64, 69.95, 5),
    ("MD", 46.1, 15.19, 67.04, 9),
    ("ME", 59.68, 22.45, 62.38, 28),
    ("MI", 56.24, 20.96, 62.72, 25),
    ("MN", 64.01, 21.68, 66.13, 11),
    ("MO", 52.27, 20.08, 61.59, 31),
    ("MS", 50.24, 24.36, 51.51, 52),
    ("MT", 69.93, 32.96, 52.86, 48),
    ("NC", 52.11, 19.73, 62.14, 30),
    ("ND", 65.77, 23.65, 64.04, 22),
    ("NE", 55.11, 21.88, 60.29, 35),
    ("NH", 55.09, 19.48, 64.64, 18),
    ("NJ", 49.27, 14.62, 70.33, 4),
    ("NM", 58.2, 24.23, 58.37, 41),
    ("NV", 80.25, 33.19, 58.64, 40),
    ("NY", 71.17, 24.57, 65.48, 15),
    ("OH", 44.88, 15.73, 64.95, 17),
    ("OK", 52.34, 24.69, 52.83, 50),
    ("OR", 71.12, 25.97, 63.49, 24),
    ("PA", 54.4, 19.45, 64.24, 20),
    ("PR", 44.96, 14.94, 66.77, 10),
    ("RI", 46.8, 14.5, 69.01, 6),
    ("SC", 48.28, 19.85, 58.88, 38),
    ("SD", 68.41, 31.52, 53.92, 46),
    ("TN", 56.77, 21.83, 61.55, 32),
    ("TX", 73.24, 28.6, 60.95, 34),
    ("UT", 68.43, 23.62, 65.49, 14),
    ("VA", 57.37, 22.33, 61.07, 33),
    ("VI", 132.16, 47.57, 64.0, 23),
    ("VT", 56.84, 20.33, 64.23, 21),
    ("WA", 75.34, 21.31, 71.71, 3),
    ("WI", 56.32, 22.68, 59.74, 36),
    ("WV", 46.59, 20.02, 57.02, 44),
    ("WY", 71.64, 44.03, 38.54, 53),
];

pub const CITY_ROWS: [Row; 50] = [
    ("New York City", 86.37, 29.91, 65.38, 27),
    ("Los Angeles", 103.16, 40.86, 60.39, 40),
    ("Chicago", 64.09, 19.87, 69.0, 14),
    ("Houston", 53.7, 21.5, 59.96, 41),
    ("Phoenix", 60.07, 19.12, 68.17, 18),
    ("Philadelphia", 54.8, 17.7, 67.71, 19),
    ("San Antonio", 45.43, 15.93, 64.93, 28),
    ("San Diego", 79.21, 28.19, 64.41, 30),
    ("Dallas", 63.92, 21.85, 65.81, 25),
    ("San Jose", 60.63, 14.82, 75.55, 2),
    ("Austin", 72.5, 22.84, 68.5, 17),
    ("Jacksonville", 47.06, 26.87, 42.9, 50),
    ("Fort Worth", 51.67, 19.68, 61.92, 37),
    ("Columbus", 44.67, 14.73, 67.02, 22),
    ("San Francisco", 113.77, 31.99, 71.89, 8),
    ("Charlotte", 58.13, 20.9, 64.04, 31),
    ("Indianapolis", 46.5, 14.53, 68.76, 15),
    ("Seattle", 98.92, 21.64, 78.12, 1),
    ("Denver", 81.11, 23.08, 71.55, 9),
    ("Washington", 80.26, 22.12, 72.43, 7),
    ("Boston", 77.58, 27.47, 64.59, 29),
    ("El Paso", 51.1, 21.5, 57.92, 44),
    ("Detroit", 53.94, 22.38, 58.5, 43),
    ("Nashville", 72.83, 23.94, 67.13, 21),
    ("Portland", 78.91, 24.81, 68.56, 16),
    ("Memphis", 48.64, 18.41, 62.15, 35),
    ("Oklahoma City", 46.07, 16.78, 63.57, 33),
    ("Las Vegas", 80.21, 35.69, 55.5, 47),
    ("Louisville", 45.52, 12.97, 71.51, 10),
    ("Baltimore", 45.61, 11.66, 74.43, 4),
    ("Milwaukee", 52.01, 22.78, 56.19, 46),
    ("Albuquerque", 51.04, 16.88, 66.93, 23),
    ("Tucson", 53.58, 23.1, 56.89, 45),
    ("Fresno", 37.39, 10.84, 71.02, 11),
    ("Mesa", 48.77, 21.72, 55.47, 48),
    ("Sacramento", 62.14, 25.45, 59.05, 42),
    ("Atlanta", 87.9, 33.39, 62.02, 36),
    ("Kansas City", 62.93, 17.23, 72.61, 6),
    ("Colorado Springs", 64.82, 23.55, 63.67, 32),
    ("Miami", 114.33, 55.77, 51.22, 49),
    ("Raleigh", 51.62, 15.24, 70.47, 12),
    ("Omaha", 49.99, 15.38, 69.24, 13),
    ("Long Beach", 54.97, 20.51, 62.7, 34),
    ("Virginia Beach", 48.91, 18.92, 61.33, 39),
    ("Oakland", 87.36, 22.26, 74.52, 3),
    ("Minneapolis", 69.67, 18.72, 73.14, 5),
    ("Tulsa", 48.54, 18.51, 61.85, 38),
    ("Arlington", 56.42, 18.27, 67.62, 20),
    ("Tampa", 70.5, 23.55, 66.59, 24),
    ("New Orleans", 55.96, 19.18, 65.73, 26),
];

pub const COUNTRY_ROW: (&str, f64, f64, f64) = ("United States", 65.59, 25.04, 61.83);
