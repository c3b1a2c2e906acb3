"""Regenerate the bundled mini gazetteer from the geonamescache dump.

Development-only; needs ``pip install geonamescache wordfreq english-words``.

    python tools/build_mini_gazetteer.py
"""

import re
import sys
import unicodedata
from pathlib import Path

import geonamescache
from english_words import get_english_words_set
from wordfreq import zipf_frequency

LANGS = ("en", "fr", "de", "it", "es", "nl", "pt", "pl")
# real places that the English word list also carries in lower case
NOT_AMBIGUOUS = {"barcelona", "berlin", "brent", "brunswick", "canada", "dover", "finland",
                 "florence", "geneva", "iceland", "jordan", "morocco", "porto", "russia",
                 "stoke", "turkey", "warsaw", "worcester", "york"}

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))
from polartrack.geo import normalize_name  # noqa: E402

OUT = Path(__file__).resolve().parents[1] / "src" / "polartrack" / "data"

# country code -> (cities to keep, extra aliases)
COUNTRIES = {
    # EU / EEA / UK / CH
    "GB": (130, ["United Kingdom", "UK", "Great Britain", "Britain", "England", "Scotland",
                 "Wales", "Northern Ireland"]),
    "DE": (80, ["Deutschland"]),
    "FR": (70, []),
    "IT": (55, ["Italia"]),
    "ES": (48, ["España"]),
    "NL": (20, ["Netherlands", "The Netherlands", "Holland"]),
    "BE": (12, ["Belgique", "België"]),
    "AT": (12, ["Österreich"]),
    "CH": (10, ["Schweiz", "Suisse"]),
    "SE": (15, ["Sverige"]),
    "DK": (10, ["Danmark"]),
    "NO": (10, ["Norge"]),
    "FI": (10, ["Suomi"]),
    "IE": (10, ["Éire", "Republic of Ireland"]),
    "PT": (12, []),
    "GR": (15, ["Hellas", "Ellada"]),
    "PL": (28, ["Polska"]),
    "CZ": (10, ["Czech Republic", "Czechia"]),
    "SK": (6, ["Slovak Republic"]),
    "HU": (12, ["Magyarország"]),
    "SI": (5, ["Slovenija"]),
    "HR": (8, ["Hrvatska"]),
    "RO": (15, ["România"]),
    "BG": (10, ["България"]),
    "LT": (5, ["Lietuva"]),
    "LV": (4, ["Latvija"]),
    "EE": (4, ["Eesti"]),
    "LU": (3, []),
    "MT": (4, []),
    "CY": (4, []),
    "IS": (3, ["Ísland"]),
    # route and neighbouring countries
    "TR": (40, ["Türkiye", "Turkiye"]),
    "MK": (6, ["Macedonia", "North Macedonia", "FYROM", "Republic of Macedonia"]),
    "RS": (8, ["Srbija"]),
    "BA": (5, ["Bosnia", "Bosnia-Herzegovina", "BiH"]),
    "ME": (3, ["Crna Gora"]),
    "AL": (5, ["Shqipëria"]),
    "XK": (4, []),
    "UA": (20, ["Ukraina"]),
    "RU": (25, ["Russian Federation", "Rossiya"]),
    "BY": (5, ["Belarus"]),
    "MD": (3, []),
    "SY": (10, ["Syrian Arab Republic"]),
    "IQ": (8, []),
    "AF": (6, []),
    "IR": (8, ["Persia"]),
    "PK": (8, []),
    "LB": (4, []),
    "JO": (4, []),
    "IL": (5, []),
    "EG": (8, []),
    "LY": (5, ["Libya"]),
    "TN": (5, []),
    "DZ": (5, []),
    "MA": (6, ["Morocco"]),
    "ER": (2, []),
    "SO": (3, []),
    "SD": (3, []),
    "NG": (6, []),
    "US": (25, ["United States", "USA", "United States of America", "America"]),
    "CA": (10, []),
    "AU": (6, []),
}
FORCE_CITIES = {"Calais", "Dover", "Mytilene", "Gevgelija", "Kos", "Subotica", "Traiskirchen",
                "Passau", "Lampedusa", "Idomeni", "Ventimiglia", "Röszke", "Tovarnik"}
FORCE_US = {"Paris"}

_LATIN = re.compile(r"^[A-Za-zÀ-ÖØ-öø-ÿĀ-ž' .-]+$")


def ascii_fold(s):
    return "".join(c for c in unicodedata.normalize("NFKD", s) if not unicodedata.combining(c))


def common_word(key, lower_words):
    return ascii_fold(key) in lower_words and zipf_frequency(key, "en") >= 3.5


def usable_alt(name, reserved, lower_words):
    if not name or not name[0].isupper() or not _LATIN.match(name):
        return False
    if name.isupper() or len(name) < 4:
        return False
    if "," in name or "\t" in name:
        return False
    key = normalize_name(name)
    if not key or len(key.split()) > 3 or key in reserved:
        return False
    if common_word(key, lower_words) or zipf_frequency(key, "en") >= 3.5:
        return False
    # keep exonyms that are actually in use somewhere in Europe
    return max(zipf_frequency(key, lang) for lang in LANGS) >= 3.0


def main():
    words = get_english_words_set(["web2"], lower=False)
    lower_words = {w for w in words if w.islower()}
    gc = geonamescache.GeonamesCache()
    countries = gc.get_countries()
    cities = list(gc.get_cities().values())
    country_keys = set()
    for cc, (_, aliases) in COUNTRIES.items():
        country_keys.add(normalize_name(countries[cc]["name"]))
        country_keys.update(normalize_name(a) for a in aliases)

    rows = []
    for cc, (quota, aliases) in COUNTRIES.items():
        info = countries[cc]
        in_country = sorted((c for c in cities if c["countrycode"] == cc),
                            key=lambda c: (-c["population"], c["geonameid"]))
        keep = in_country[:quota]
        forced = FORCE_US if cc == "US" else FORCE_CITIES
        keep += [c for c in in_country[quota:] if c["name"] in forced]
        capital = next((c for c in in_country if c["name"] == info["capital"]),
                       in_country[0] if in_country else None)
        lat, lon = (capital["latitude"], capital["longitude"]) if capital else (0.0, 0.0)
        rows.append((str(info["geonameid"]), info["name"], aliases, lat, lon, cc,
                     int(info["population"]), "country"))
        for c in keep:
            own = normalize_name(c["name"])
            seen, alts = {own}, []
            for a in c["alternatenames"]:
                if usable_alt(a, country_keys, lower_words) and normalize_name(a) not in seen:
                    seen.add(normalize_name(a))
                    alts.append(a)
            rows.append((str(c["geonameid"]), c["name"], alts[:12], round(c["latitude"], 5),
                         round(c["longitude"], 5), cc, int(c["population"]), "city"))

    with open(OUT / "mini_gazetteer.tsv", "w", encoding="utf-8", newline="") as fh:
        fh.write("id\tprimary_name\talternate_names\tlatitude\tlongitude\t"
                 "country_code\tpopulation\tkind\n")
        for r in rows:
            fh.write("\t".join([r[0], r[1], ",".join(r[2]), str(r[3]), str(r[4]),
                                r[5], str(r[6]), r[7]]) + "\n")

    single = set()
    for r in rows:
        for name in [r[1], *r[2]]:
            key = normalize_name(name)
            if " " not in key:
                single.add(key)
    ambiguous = sorted(k for k in single
                       if common_word(k, lower_words) and k not in NOT_AMBIGUOUS)
    with open(OUT / "capitalized_only.txt", "w", encoding="utf-8") as fh:
        fh.write("# single-word place names that are also common English words\n")
        fh.write("# generated by tools/build_mini_gazetteer.py\n")
        fh.write("\n".join(ambiguous) + "\n")
    print(f"{len(rows)} gazetteer rows, {len(ambiguous)} capitalized-only names")


if __name__ == "__main__":
    main()
