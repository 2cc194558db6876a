#!/usr/bin/env python3
"""Deterministic generator for the synthetic cumulative-count fixtures.

Writes three CSV files in the Johns Hopkins CSSE global time-series layout
(Province/State, Country/Region, Lat, Long, then one cumulative column per
day from 1/22/20 to 4/27/20) plus MANIFEST.json with row/column counts and
SHA-256 checksums.

The values are synthetic: epidemic-shaped Poisson counts with reporting
corrections, bulk recovery reports and silent (all-zero) regions. They are
not the archived CSSE data, which this build environment cannot download.

    python3 data/fixtures/generate.py
"""

import csv
import datetime as dt
import hashlib
import io
import json
import os
import zlib

import numpy as np

SEED = 20200427
HERE = os.path.dirname(os.path.abspath(__file__))

COUNTRIES = """Afghanistan;Albania;Algeria;Andorra;Angola;Antigua and Barbuda;Argentina;Armenia;
Austria;Azerbaijan;Bahamas;Bahrain;Bangladesh;Barbados;Belarus;Belgium;Benin;Bhutan;Bolivia;
Bosnia and Herzegovina;Brazil;Brunei;Bulgaria;Burkina Faso;Cabo Verde;Cambodia;Cameroon;
Central African Republic;Chad;Chile;Colombia;Congo (Brazzaville);Congo (Kinshasa);Costa Rica;
Cote d'Ivoire;Croatia;Diamond Princess;Cuba;Cyprus;Czechia;Djibouti;Dominican Republic;Ecuador;
Egypt;El Salvador;Equatorial Guinea;Eritrea;Estonia;Eswatini;Ethiopia;Fiji;Finland;Gabon;Gambia;
Georgia;Germany;Ghana;Greece;Guatemala;Guinea;Guyana;Haiti;Holy See;Honduras;Hungary;Iceland;
India;Indonesia;Iran;Iraq;Ireland;Israel;Italy;Jamaica;Japan;Jordan;Kazakhstan;Kenya;
Korea, South;Kuwait;Kyrgyzstan;Latvia;Lebanon;Liberia;Liechtenstein;Lithuania;Luxembourg;
Madagascar;Malaysia;Maldives;Malta;Mauritania;Mauritius;Mexico;Moldova;Monaco;Mongolia;
Montenegro;Morocco;Namibia;Nepal;New Zealand;Nicaragua;Niger;Nigeria;North Macedonia;Norway;
Oman;Pakistan;Panama;Papua New Guinea;Paraguay;Peru;Philippines;Poland;Portugal;Qatar;Romania;
Russia;Rwanda;Saint Lucia;Saint Vincent and the Grenadines;San Marino;Saudi Arabia;Senegal;
Serbia;Seychelles;Singapore;Slovakia;Slovenia;Somalia;South Africa;Spain;Sri Lanka;Sudan;
Suriname;Sweden;Switzerland;Taiwan*;Tanzania;Thailand;Togo;Trinidad and Tobago;Tunisia;Turkey;
Uganda;Ukraine;United Arab Emirates;Uruguay;US;Uzbekistan;Venezuela;Vietnam;Zambia;Zimbabwe;
Dominica;Grenada;Mozambique;Syria;Timor-Leste;Belize;Laos;Libya;West Bank and Gaza;
Guinea-Bissau;Mali;Saint Kitts and Nevis;Kosovo;Burma;MS Zaandam;Botswana;Burundi;Sierra Leone;
Malawi;South Sudan;Western Sahara;Sao Tome and Principe;Yemen;Tajikistan;Lesotho""".replace("\n", "")

PROVINCES = {
    "Australia": "Australian Capital Territory;New South Wales;Northern Territory;Queensland;"
    "South Australia;Tasmania;Victoria;Western Australia",
    "Canada": "Alberta;British Columbia;Grand Princess;Manitoba;New Brunswick;"
    "Newfoundland and Labrador;Nova Scotia;Ontario;Prince Edward Island;Quebec;"
    "Saskatchewan;Diamond Princess;Recovered;Northwest Territories;Yukon",
    "China": "Anhui;Beijing;Chongqing;Fujian;Gansu;Guangdong;Guangxi;Guizhou;Hainan;Hebei;"
    "Heilongjiang;Henan;Hong Kong;Hubei;Hunan;Inner Mongolia;Jiangsu;Jiangxi;Jilin;Liaoning;"
    "Macau;Ningxia;Qinghai;Shaanxi;Shandong;Shanghai;Shanxi;Sichuan;Tianjin;Tibet;Xinjiang;"
    "Yunnan;Zhejiang",
    "Denmark": "Faroe Islands;Greenland;",
    "France": "French Guiana;French Polynesia;Guadeloupe;Mayotte;New Caledonia;Reunion;"
    "Saint Barthelemy;St Martin;Martinique;Saint Pierre and Miquelon;",
    "Netherlands": "Aruba;Curacao;Sint Maarten;Bonaire, Sint Eustatius and Saba;",
    "United Kingdom": "Bermuda;Cayman Islands;Channel Islands;Gibraltar;Isle of Man;Montserrat;"
    "Anguilla;British Virgin Islands;Turks and Caicos Islands;Falkland Islands (Malvinas);",
}

START = dt.date(2020, 1, 22)
DAYS = 97


def region_keys():
    keys = [("", c.strip()) for c in COUNTRIES.split(";") if c.strip()]
    for country, provs in PROVINCES.items():
        for p in provs.split(";"):
            keys.append((p.strip(), country))
    keys.sort(key=lambda k: (k[1], k[0]))
    return keys


def date_labels():
    out = []
    for d in range(DAYS):
        day = START + dt.timedelta(days=d)
        out.append(f"{day.month}/{day.day}/{day.year % 100}")
    return out


def epidemic_rate(rng, key):
    t = np.arange(DAYS, dtype=float)
    province, country = key
    if (province, country) == ("Hubei", "China"):
        rise = np.exp(-((t - 20.0) / 7.0) ** 2) * 3000.0
        rise[22] += 12000.0
        return rise
    if province == "" and country == "US":
        peak, onset, width = 30000.0, 68.0, 9.0
    elif province == "" and country in ("Spain", "Italy", "France", "Germany", "United Kingdom"):
        peak, onset, width = rng.uniform(3000, 8000), rng.uniform(55, 65), rng.uniform(6, 10)
    else:
        peak = float(np.exp(rng.normal(1.5, 2.0)))
        onset = rng.uniform(45, 85)
        width = rng.uniform(5, 14)
    # logistic ramp followed by a slow plateau or decline
    ramp = 1.0 / (1.0 + np.exp(-(t - onset) / (0.35 * width)))
    decline = np.where(t > onset + width, np.exp(-(t - onset - width) / rng.uniform(15, 80)), 1.0)
    return peak * ramp * decline


def cumulative(daily):
    return np.cumsum(daily).astype(np.int64)


def corrections(rng, daily):
    # occasional downward revisions make the cumulative series non-monotone
    if rng.random() < 0.15 and daily.sum() > 20:
        day = rng.integers(50, DAYS)
        daily[day] -= rng.integers(1, max(2, int(daily[:day].sum() * 0.05)))
    return daily


def build(rng):
    keys = region_keys()
    assert len(keys) == 266, len(keys)
    confirmed, recovered, deaths = {}, {}, {}
    for key in keys:
        lam = epidemic_rate(rng, key)
        cases = rng.poisson(lam).astype(np.int64)
        cases = corrections(rng, cases)
        confirmed[key] = cases

        frac = 0.0 if rng.random() < 0.2 else rng.uniform(0.2, 0.9)
        lag = int(rng.integers(10, 24))
        lagged = np.concatenate([np.zeros(lag), lam[:-lag]])
        rec = rng.poisson(frac * lagged).astype(np.int64)
        if rng.random() < 0.1 and rec.sum() > 0:
            day = int(rng.integers(70, DAYS))
            rec[day] += int(rec.sum() * rng.uniform(0.2, 0.6))
        recovered[key] = rec

        cfr = rng.uniform(0.005, 0.12)
        dlag = int(rng.integers(5, 14))
        dlagged = np.concatenate([np.zeros(dlag), lam[:-dlag]])
        deaths[key] = corrections(rng, rng.poisson(cfr * dlagged).astype(np.int64))

    # recovered is reported nationally for Canada and is missing for a few
    # regions; confirmed carries two cruise-ship rows absent from deaths
    rec_keys = [k for k in keys if k[1] != "Canada"]
    rec_keys += [("", "Canada")]
    drop = [("", "Western Sahara"), ("", "Sao Tome and Principe")]
    rec_keys = [k for k in rec_keys if k not in drop]
    recovered[("", "Canada")] = rng.poisson(np.linspace(0, 400, DAYS)).astype(np.int64)

    death_keys = [k for k in keys if k not in (("", "MS Zaandam"), ("Grand Princess", "Canada"))]
    return keys, confirmed, rec_keys, recovered, death_keys, deaths


def latlong(key):
    rng = np.random.default_rng(zlib.crc32("|".join(key).encode("utf-8")))
    return f"{rng.uniform(-45, 65):.4f}", f"{rng.uniform(-170, 175):.4f}"


def render(keys, table):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["Province/State", "Country/Region", "Lat", "Long"] + date_labels())
    for key in keys:
        lat, lon = latlong(key)
        w.writerow([key[0], key[1], lat, lon] + [str(v) for v in cumulative(table[key])])
    return buf.getvalue()


def main():
    rng = np.random.default_rng(SEED)
    keys, conf, rec_keys, rec, death_keys, dead = build(rng)
    files = {
        "time_series_covid19_confirmed_global.csv": render(keys, conf),
        "time_series_covid19_recovered_global.csv": render(rec_keys, rec),
        "time_series_covid19_deaths_global.csv": render(death_keys, dead),
    }
    manifest = {"synthetic": True, "seed": SEED, "files": {}}
    for name, text in files.items():
        with open(os.path.join(HERE, name), "w", encoding="utf-8", newline="") as f:
            f.write(text)
        rows = list(csv.reader(io.StringIO(text)))
        manifest["files"][name] = {
            "data_rows": len(rows) - 1,
            "columns": len(rows[0]),
            "date_columns": len(rows[0]) - 4,
            "sha256": hashlib.sha256(text.encode("utf-8")).hexdigest(),
        }
    conf_keys = {tuple(r[:2]) for r in csv.reader(io.StringIO(files[
        "time_series_covid19_confirmed_global.csv"]))}
    joined = [k for k in rec_keys if k in conf_keys]
    manifest["net_infections"] = {"N": len(joined), "T": DAYS - 1}
    manifest["daily_deaths"] = {"N": len(death_keys), "T": DAYS - 1}
    path = os.path.join(HERE, "MANIFEST.json")
    old = {}
    if os.path.exists(path):
        with open(path, encoding="utf-8") as f:
            old = json.load(f)
    # clustering results are recorded by hand after a run; keep them
    for key in ("clustering",):
        if key in old:
            manifest[key] = old[key]
    with open(path, "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main()
