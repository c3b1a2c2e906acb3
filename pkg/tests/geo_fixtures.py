"""Labeled free-text profile locations: (text, city_id, country_code).

City ids are those of the bundled mini gazetteer. ``None`` for the city
means only the country is expected.
"""

LABELED_LOCATIONS = [
    ("London, UK", "2643743", "GB"),
    ("Paris, France", "2988507", "FR"),
    ("Berlin", "2950159", "DE"),
    ("München", "2867714", "DE"),
    ("Wien, Österreich", "2761369", "AT"),
    ("Budapest, Hungary", "3054643", "HU"),
    ("Athens, Greece", "264371", "GR"),
    ("Manchester, England", "2643123", "GB"),
    ("Calais", "3029162", "FR"),
    ("Roma, Italia", "3169070", "IT"),
    ("Stockholm, Sweden", "2673730", "SE"),
    ("Barcelona", "3128760", "ES"),
    ("Dublin, Ireland", "2964574", "IE"),
    ("Paris, Texas", "4717560", "US"),
    ("Köln", "2886242", "DE"),
    ("Lisboa", "2267057", "PT"),
    ("Warszawa, Poland", "756135", "PL"),
    ("Bruxelles", "2800866", "BE"),
    ("Amsterdam NL", "2759794", "NL"),
    ("somewhere near Lyon, FR", "2996944", "FR"),
]
