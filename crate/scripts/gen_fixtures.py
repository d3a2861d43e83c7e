#!/usr/bin/env python3
"""Generate the synthetic fixture corpus and its construction-truth oracles.

Everything is derived from one seeded RNG, so rerunning the script
reproduces fixtures/ byte for byte. The golden/ files are computed from what
was placed into each record (which domain, which user, which keyword), not
by re-parsing the feeds, so they serve as independent oracles for the Rust
pipeline.

Usage: python3 scripts/gen_fixtures.py [OUT_DIR]   (default: fixtures)
"""

import csv
import datetime as dt
import json
import math
import random
import sys
import unicodedata
from collections import Counter, defaultdict
from pathlib import Path

SEED = 20210313
START = dt.date(2020, 12, 20)
DAYS = [START + dt.timedelta(days=i) for i in range(30)]
ZERO_DAY = dt.date(2021, 1, 10)  # no matching post on either platform
FB_ZERO_SHARE_DAY = dt.date(2021, 1, 3)  # matching posts, but no shares
V_DAY = dt.date(2020, 12, 27)

TW_RECORDS, TW_MATCHING = 7000, 4400
FB_ROWS, FB_MATCHING = 3000, 1800
LOCATED_USERS, RESOLVED_USERS, UNLOCATED_USERS = 1000, 540, 320

KEYWORDS = [
    "vaccini", "vaccino", "vaccinazioni", "iononmivaccino", "vaccinazione",
    "vaccinocovid", "vaccinarsi", "vaccinare", "vacciniamoci", "vaccinareh24",
    "vaccinerò", "vaccinoanticovid", "vaccinerai", "vaccineremo", "vaccinerete",
    "iononmivaccinero", "novaccinoainovax", "iononsonounacavia",
]

LOW = [
    "imolaoggi.it", "byoblu.it", "voxnews.info", "databaseitalia.it",
    "ilprimatonazionale.it", "lantidiplomatico.it", "scenarieconomici.it",
    "maurizioblondet.it", "comedonchisciotte.org", "stopcensura.online",
    "informarexresistere.fr", "mittdolcino.com", "ilsapereepotere2.blogspot.com",
    "lettoquotidiano.it", "renovatio21.com", "sadefenza.blogspot.com",
    "catenaumana.it", "ilpopulista.it", "jedanews.it", "notiziarioestero.com",
    "direttanews24.com", "nogeoingegneria.com", "luogocomune.net",
    "conoscenzealconfine.it", "ilfattoquotidaino.it", "vocedellevoci.it",
]
HIGH = [
    "corriere.it", "repubblica.it", "ansa.it", "ilsole24ore.com", "lastampa.it",
    "ilfattoquotidiano.it", "rainews.it", "mediaset.it", "ilgiornale.it",
    "liberoquotidiano.it", "open.online", "fanpage.it", "agi.it", "ilmessaggero.it",
]
# Tweets per high-credibility domain: flat enough that the low-credibility
# total beats every single one of them.
HIGH_TWEETS = [34, 31, 29, 27, 25, 23, 21, 19, 17, 15, 13, 11, 9, 7]
UNKNOWN = [
    "wikipedia.org", "salute.gov.it", "facebook.com", "instagram.com",
    "bbc.co.uk", "governo.it", "who.int", "example.org", "change.org",
    "telegram.me", "iss.it", "nytimes.com",
]

# (name, kind, region, population)
REGIONS = [
    ("Abruzzo", "ABR", 1281012), ("Basilicata", "BAS", 545130),
    ("Calabria", "CAL", 1860601), ("Campania", "CAM", 5679759),
    ("Emilia-Romagna", "EMR", 4438937), ("Friuli-Venezia Giulia", "FVG", 1201510),
    ("Lazio", "LAZ", 5720536), ("Liguria", "LIG", 1509805),
    ("Lombardia", "LOM", 9966992), ("Marche", "MAR", 1498236),
    ("Molise", "MOL", 294294), ("Piemonte", "PIE", 4252279),
    ("Puglia", "PUG", 3933777), ("Sardegna", "SAR", 1590044),
    ("Sicilia", "SIC", 4833705), ("Toscana", "TOS", 3692865),
    ("Trentino-Alto Adige", "TAA", 1077078), ("Umbria", "UMB", 865452),
    ("Valle d'Aosta", "VDA", 123895), ("Veneto", "VEN", 4854633),
]
PROVINCES = [
    ("Roma", "LAZ"), ("Milano", "LOM"), ("Napoli", "CAM"), ("Torino", "PIE"),
    ("Bari", "PUG"), ("Palermo", "SIC"), ("Firenze", "TOS"), ("Bologna", "EMR"),
    ("Forlì-Cesena", "EMR"), ("Reggio Calabria", "CAL"),
]
MUNICIPALITIES = [
    ("Roma", "LAZ"), ("Milano", "LOM"), ("Napoli", "CAM"), ("Torino", "PIE"),
    ("Venezia", "VEN"), ("Paese", "VEN"), ("Sesto", "TAA"),
    ("Sesto San Giovanni", "LOM"), ("Forlì", "EMR"), ("Reggio nell'Emilia", "EMR"),
    ("Genova", "LIG"), ("Cagliari", "SAR"), ("Perugia", "UMB"), ("Ancona", "MAR"),
    ("Aosta", "VDA"), ("Trento", "TAA"), ("Campobasso", "MOL"), ("Potenza", "BAS"),
    ("Pescara", "ABR"), ("Trieste", "FVG"),
]

YT_ALPHABET = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_"
FEATURED_VIDEO = "kHGtn_vnrJ8"


# --- independent text oracle -------------------------------------------------

def _fold(s):
    s = unicodedata.normalize("NFKD", s)
    return "".join(c for c in s if not unicodedata.combining(c)).lower()


def normalize(s):
    cur = _fold(s)
    for _ in range(8):
        nxt = _fold(cur)
        if nxt == cur:
            break
        cur = nxt
    return " ".join(cur.split())


def tokens(s):
    out, cur = [], []
    for c in normalize(s):
        if c.isalnum():
            cur.append(c)
        elif cur:
            out.append("".join(cur))
            cur = []
    if cur:
        out.append("".join(cur))
    return out


NORM_KEYWORDS = [normalize(k) for k in KEYWORDS]


def keyword_hits(text):
    kws = set(NORM_KEYWORDS)
    seen = []
    for t in tokens(text):
        if t in kws and t not in seen:
            seen.append(t)
    return seen


def gazetteer_entries():
    rows = [(n, "region", c, p) for n, c, p in REGIONS]
    rows += [(n, "province", c, None) for n, c in PROVINCES]
    rows += [(n, "municipality", c, None) for n, c in MUNICIPALITIES]
    return rows


KIND_RANK = {"region": 0, "province": 1, "municipality": 2}


def resolve(location, entries):
    toks = tokens(location)
    best = None
    for name, kind, region, _ in entries:
        nt = tokens(name)
        if not any(toks[i:i + len(nt)] == nt for i in range(len(toks) - len(nt) + 1)):
            continue
        key = (-len(normalize(name)), KIND_RANK[kind], normalize(name))
        if best is None or key < best[0]:
            best = (key, normalize(name), kind, region)
    return None if best is None else best[1:]


def pearson(xs, ys):
    n = len(xs)
    mx, my = sum(xs) / n, sum(ys) / n
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    sxx = sum((x - mx) ** 2 for x in xs)
    syy = sum((y - my) ** 2 for y in ys)
    return sxy / math.sqrt(sxx * syy)


def mid_ranks(xs):
    order = sorted(range(len(xs)), key=lambda i: xs[i])
    ranks = [0.0] * len(xs)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and xs[order[j + 1]] == xs[order[i]]:
            j += 1
        for k in range(i, j + 1):
            ranks[order[k]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


# --- construction --------------------------------------------------------------

class Builder:
    def __init__(self, seed):
        self.rng = random.Random(seed)
        self.tw_seq = 1340000000000000000
        self.url_seq = 0
        self.short_seq = 0
        self.redirects = []  # (short, expanded)
        self.url_truth = {}  # raw url -> (canonical domain, class)

    # urls
    def path(self):
        self.url_seq += 1
        words = ["vax", "dosi", "pfizer", "aifa", "news", "salute", "covid", "politica"]
        return f"/{2020 + self.rng.randint(0, 1)}/{self.rng.randint(1, 12):02d}/{self.rng.choice(words)}-{self.url_seq}"

    def domain_url(self, domain):
        """A raw URL whose registrable domain is `domain`, in a varied shape."""
        r = self.rng.random()
        p = self.path()
        if domain.endswith(".blogspot.com"):
            host = domain
        elif r < 0.45:
            host = "www." + domain
        elif r < 0.55:
            host = self.rng.choice(["m.", "blog.", "amp."]) + domain
        elif r < 0.62:
            host = ("WWW." + domain).upper() if self.rng.random() < 0.5 else domain.capitalize()
        else:
            host = domain
        scheme = "http" if self.rng.random() < 0.15 else "https"
        port = ":443" if scheme == "https" and self.rng.random() < 0.03 else ""
        query = "?utm_source=twitter&x=1" if self.rng.random() < 0.2 else ""
        frag = "#comments" if self.rng.random() < 0.05 else ""
        return f"{scheme}://{host}{port}{p}{query}{frag}"

    def video_url(self, vid):
        r = self.rng.random()
        if r < 0.5:
            return f"https://www.youtube.com/watch?v={vid}"
        if r < 0.75:
            return f"https://youtu.be/{vid}"
        if r < 0.85:
            return f"https://m.youtube.com/watch?v={vid}&t=42s"
        if r < 0.93:
            return f"https://www.youtube.com/embed/{vid}"
        return f"https://www.youtube.com/shorts/{vid}"

    def short_url(self):
        self.short_seq += 1
        n = self.short_seq * 7919 + 104729
        code = ""
        while n:
            n, d = divmod(n, 62)
            code += YT_ALPHABET[d]
        return f"https://t.co/{code}"

    def record_url(self, raw, domain, cls):
        prev = self.url_truth.get(raw)
        assert prev is None or prev == (domain, cls), raw
        self.url_truth[raw] = (domain, cls)


def class_of(domain):
    if domain in LOW:
        return "low"
    if domain in HIGH:
        return "high"
    return "unknown"


POSITIVE_TEMPLATES = [
    "Domani mi {kw}!", "{kw} oggi in Lombardia", "Leggete qui: {kw}", "{kw} {kw2} ovunque",
    "Non capisco tutta questa fretta sui {kw}", "{kw}. Punto.", "Ho deciso: {kw}",
    "Aggiornamento quotidiano {kw}", "Secondo voi {kw}?", "Il piano {kw} parte ora",
    "Fila al centro: {kw}", "{kw}, la mia esperienza", "Ma davvero {kw}?!",
]
NEGATIVE_TEMPLATES = [
    "il vaccinista parla", "antivaccinisti ovunque", "#vaccinoCovid19 in tendenza",
    "vaccinazionii che errore", "vacci no grazie", "oggi piove a dirotto",
    "partita stasera", "la mia ricetta della carbonara", "vaccinati e contenti",
    "buon anno a tutti", "novax in piazza", "dose di richiamo?", "il vaccinodromo apre",
    "#vaccinareh48 che ne pensate", "#iononmivaccinerei",
]


def surface(rng, kw):
    forms = [kw, kw.upper(), kw.capitalize(), "#" + kw]
    if kw == "vaccinerò":
        forms += ["vaccinero", "VACCINERÒ", "#vaccinerò", "Vaccinerò"]
    if kw == "iononmivaccino":
        forms += ["#IoNonMiVaccino", "#iononmivaccino"]
    if kw == "vaccino":
        forms += ["vaccìno", "VACCINÒ"]
    return rng.choice(forms)


def positive_text(rng):
    kw = rng.choice(KEYWORDS)
    kw2 = rng.choice(KEYWORDS)
    tpl = rng.choice(POSITIVE_TEMPLATES)
    return tpl.format(kw=surface(rng, kw), kw2=surface(rng, kw2))


def negative_text(rng):
    return rng.choice(NEGATIVE_TEMPLATES)


def day_weights(days, rng):
    w = []
    for d in days:
        base = 1.0 + 0.25 * math.sin(d.toordinal() / 3.5)
        if d == V_DAY:
            base *= 2.6
        elif abs((d - V_DAY).days) == 1:
            base *= 1.6
        w.append(base * rng.uniform(0.85, 1.15))
    return w


def allocate(total, weights):
    s = sum(weights)
    raw = [total * w / s for w in weights]
    out = [int(x) for x in raw]
    rest = sorted(range(len(raw)), key=lambda i: raw[i] - out[i], reverse=True)
    for i in rest[: total - sum(out)]:
        out[i] += 1
    return out


def ts(rng, day):
    t = dt.datetime.combine(day, dt.time()) + dt.timedelta(seconds=rng.randrange(86400))
    return t


def zipf_weights(n, s=1.1):
    return [1 / (i + 1) ** s for i in range(n)]


def make_videos(rng):
    ids = {FEATURED_VIDEO}
    while len(ids) < 60:
        ids.add("".join(rng.choice(YT_ALPHABET) for _ in range(11)))
    ids = sorted(ids)
    ids.remove(FEATURED_VIDEO)
    rng.shuffle(ids)
    return [FEATURED_VIDEO] + ids


# --- users and regions ---------------------------------------------------------

RESOLVING_FORMS = {
    "LAZ": ["Roma", "Roma, Lazio", "Lazio", "roma città eterna", "ROMA"],
    "LOM": ["Milano", "Lombardia", "Milano - Lombardia", "Sesto San Giovanni", "milano 🇮🇹"],
    "CAM": ["Napoli", "Campania", "Napoli, Italia", "NAPOLI ❤️"],
    "PIE": ["Torino", "Piemonte", "Torino (TO)"],
    "VEN": ["Venezia", "Veneto", "vivo a Paese", "Venezia, Veneto"],
    "EMR": ["Bologna", "Forlì", "Reggio nell'Emilia", "Emilia-Romagna", "Forlì-Cesena"],
    "PUG": ["Bari", "Puglia", "Bari, Puglia"],
    "SIC": ["Palermo", "Sicilia", "palermo, sicilia"],
    "TOS": ["Firenze", "Toscana", "Firenze, Italia"],
    "CAL": ["Reggio Calabria", "Calabria"],
    "SAR": ["Cagliari", "Sardegna"],
    "LIG": ["Genova", "Liguria"],
    "MAR": ["Ancona", "Marche"],
    "ABR": ["Pescara", "Abruzzo"],
    "FVG": ["Trieste", "Friuli-Venezia Giulia"],
    "TAA": ["Trento", "Sesto", "Trentino-Alto Adige"],
    "UMB": ["Perugia", "Umbria"],
    "BAS": ["Potenza", "Basilicata"],
    "MOL": ["Campobasso", "Molise"],
    "VDA": ["Aosta", "Valle d'Aosta"],
}
UNRESOLVED_PARTS = [
    "Italia", "Terra", "Europa", "nel cuore", "ovunque", "Mondo", "🇮🇹", "Paris, France",
    "romantica", "Milanese imbruttito", "Torinese", "Napoletano nel mondo", "casa",
    "Sud Italia", "Nord-Est", "dove capita", "Berlin", "London", "in viaggio", "Bel Paesello",
    "Isola che non c'è", "Svizzera", "lontano", "qui", "Via Lattea",
]


def region_user_counts(rng):
    pops = [p for _, _, p in REGIONS]
    total = sum(pops)
    for _ in range(10000):
        counts = [max(1, round(RESOLVED_USERS * p / total * rng.lognormvariate(0, 0.45))) for p in pops]
        diff = RESOLVED_USERS - sum(counts)
        counts[pops.index(max(pops))] += diff
        if min(counts) < 1:
            continue
        r = pearson(counts, pops)
        if 0.885 <= r <= 0.895:
            return counts, r
    raise SystemExit("could not tune users vs population")


def build(out):
    b = Builder(SEED)
    rng = b.rng
    entries = gazetteer_entries()
    videos = make_videos(rng)
    video_w = zipf_weights(len(videos), 0.9)

    # users
    counts, r_users = region_user_counts(rng)
    users = []  # dict(id, location, region, heavy)
    uid = 0
    region_users = {}
    for (rname, code, pop), n in zip(REGIONS, counts):
        region_users[code] = []
        for i in range(n):
            uid += 1
            forms = RESOLVING_FORMS[code]
            loc = forms[i % len(forms)] if i < len(forms) else rng.choice(forms)
            u = {"id": f"u{uid:05d}", "location": loc, "region": code}
            users.append(u)
            region_users[code].append(u)
    unresolved = []
    while len(unresolved) < LOCATED_USERS - RESOLVED_USERS:
        parts = rng.sample(UNRESOLVED_PARTS, rng.choice([1, 1, 2]))
        loc = ", ".join(parts) if rng.random() < 0.8 else " / ".join(parts)
        assert resolve(loc, entries) is None, loc
        uid += 1
        u = {"id": f"u{uid:05d}", "location": loc, "region": None}
        unresolved.append(u)
    users += unresolved
    unlocated = []
    for _ in range(UNLOCATED_USERS):
        uid += 1
        unlocated.append({"id": f"u{uid:05d}", "location": rng.choice([None, "", "   "]), "region": None})
    for u in users:
        hit = resolve(u["location"], entries)
        assert (hit[2] if hit else None) == u["region"], (u, hit)
    rng.shuffle(users)

    # twitter skeleton: per day matching counts, low counts
    active_days = [d for d in DAYS if d != ZERO_DAY]
    tw_per_day = dict(zip(active_days, allocate(TW_MATCHING, day_weights(active_days, rng))))
    tweets = []  # dicts with day, cats
    for d in active_days:
        n = tw_per_day[d]
        lows = max(1, round(n * rng.uniform(0.006, 0.015)))
        for i in range(n):
            tweets.append({"day": d, "low": i < lows})
    rng.shuffle(tweets)
    high_slots = [dom for dom, c in zip(HIGH, HIGH_TWEETS) for _ in range(c)]
    rng.shuffle(high_slots)
    nonlow = [t for t in tweets if not t["low"]]
    low_tweets = [t for t in tweets if t["low"]]
    for t, dom in zip(rng.sample(nonlow, len(high_slots)), high_slots):
        t["high"] = dom
    # a few low tweets also cite a high source
    for t in rng.sample(low_tweets, 6):
        t["high"] = rng.choice(HIGH)
    low_w = zipf_weights(len(LOW), 1.5)
    for t in low_tweets:
        t["lowdom"] = rng.choices(LOW, low_w)[0]
    for t in rng.sample(low_tweets, 4):
        t["lowdom2"] = rng.choice([x for x in LOW if x != t["lowdom"]])

    # authors: heavy user per region carries its only low tweet
    plan = {}  # user id -> (n_low, n_total)
    for code, us in region_users.items():
        n = len(us)
        m = rng.uniform(0.0024, 0.0046)
        total = max(2, round(1 / (n * m)))
        plan[us[0]["id"]] = (1, total)
        for u in us[1:]:
            plan[u["id"]] = (0, rng.choice([1, 1, 2, 2, 3, 4]))
    for u in unresolved:
        plan[u["id"]] = (0, rng.choice([1, 1, 2, 3]))
    need_low = sum(p[0] for p in plan.values())
    need_total = sum(p[1] for p in plan.values())
    assert need_low < len(low_tweets) and need_total < len(tweets), (need_low, need_total)
    rng.shuffle(low_tweets)
    nonlow = [t for t in tweets if not t["low"]]
    rng.shuffle(nonlow)
    li = ni = 0
    for u in users:
        k_low, k_tot = plan[u["id"]]
        for _ in range(k_low):
            low_tweets[li]["user"] = u
            li += 1
        for _ in range(k_tot - k_low):
            nonlow[ni]["user"] = u
            ni += 1
    # unresolved located users may also post low-credibility links
    spare = low_tweets[li:] + nonlow[ni:]
    rng.shuffle(spare)
    pool = unresolved + unlocated
    for t in spare:
        t["user"] = rng.choice(pool) if rng.random() < 0.5 else rng.choice(unlocated)

    # timestamps, unique per user, sorted later by id only
    for t in tweets:
        t["ts"] = ts(rng, t["day"])
    # some resolved users had another location on an earlier tweet
    by_user = defaultdict(list)
    for t in tweets:
        by_user[t["user"]["id"]].append(t)
    movers = [u for u in users if u["region"] and len(by_user[u["id"]]) >= 2]
    for u in rng.sample(movers, 30):
        ts_sorted = sorted(by_user[u["id"]], key=lambda t: t["ts"])
        assert ts_sorted[0]["ts"] != ts_sorted[-1]["ts"]
        ts_sorted[0]["location_override"] = rng.choice(["Italia", "", "Torinese"])

    # urls for each matching tweet
    for t in tweets:
        urls = []
        if t.get("low"):
            urls.append(t["lowdom"])
            if "lowdom2" in t:
                urls.append(t["lowdom2"])
        if "high" in t:
            urls.append(t["high"])
        r = rng.random()
        if not urls and r < 0.16:
            urls.append(rng.choice(UNKNOWN))
        if rng.random() < 0.045:
            urls.append(("video", rng.choices(videos, video_w)[0]))
        t["targets"] = urls

    # non-matching tweets
    negatives = []
    for i in range(TW_RECORDS - TW_MATCHING):
        d = rng.choice(DAYS)
        u = rng.choice(users + unlocated)
        targets = []
        if rng.random() < 0.2:
            targets.append(rng.choice(LOW + HIGH + UNKNOWN))
        negatives.append({"day": d, "ts": ts(rng, d), "user": u, "targets": targets, "negative": True})

    all_tweets = tweets + negatives
    rng.shuffle(all_tweets)
    all_tweets.sort(key=lambda t: t["ts"])

    tw_lines = []
    for t in all_tweets:
        b.tw_seq += rng.randint(1, 5000)
        t["id"] = str(b.tw_seq)
        text = negative_text(rng) if t.get("negative") else positive_text(rng)
        raws = []
        entity_mode = rng.random()
        entities = []
        for tgt in t["targets"]:
            if isinstance(tgt, tuple):
                raw = b.video_url(tgt[1])
                b.record_url(raw, "youtube.com" if "youtube" in raw else "youtu.be", "unknown")
                truth = ("video", tgt[1])
            else:
                raw = b.domain_url(tgt)
                b.record_url(raw, tgt, class_of(tgt))
                truth = tgt
            raws.append((raw, truth))
        if raws and entity_mode < 0.6:
            for raw, _ in raws:
                entities.append({"url": b.short_url(), "expanded_url": raw})
            shown = " ".join(e["url"] for e in entities)
            text = f"{text} {shown}"
            t["urls"] = [raw for raw, _ in raws]
        elif raws and entity_mode < 0.85:
            text = f"{text} " + " ".join(raw for raw, _ in raws)
            t["urls"] = [raw for raw, _ in raws]
        elif raws:
            shorts = []
            for raw, _ in raws:
                s = b.short_url()
                if rng.random() < 0.3:
                    mid = f"https://bit.ly/{s.rsplit('/', 1)[1]}x"
                    b.redirects.append((s, mid))
                    b.redirects.append((mid, raw))
                else:
                    b.redirects.append((s, raw))
                shorts.append(s)
                (dom, cls) = b.url_truth[raw]
                b.record_url(s, dom, cls)
            text = f"{text} " + " ".join(shorts)
            t["urls"] = shorts
        else:
            t["urls"] = []
        t["text"] = text
        t["hits"] = keyword_hits(text)
        assert bool(t["hits"]) != bool(t.get("negative")), text
        u = t["user"]
        loc = t.get("location_override", u["location"])
        rec = {"id": t["id"], "created_at": t["ts"].strftime("%Y-%m-%dT%H:%M:%SZ"), "text": text,
               "user": {"id": u["id"], "location": loc}}
        if entities:
            rec["entities"] = {"urls": entities}
        elif entity_mode >= 0.6 and not raws and rng.random() < 0.5:
            rec["entities"] = {"urls": []}
        t["record"] = rec
        tw_lines.append(json.dumps(rec, ensure_ascii=False))
    # a handful of unmapped shorteners: stay Unknown under t.co
    for t in rng.sample([t for t in all_tweets if not t["urls"] and "entities" not in t["record"]], 5):
        s = b.short_url()
        b.record_url(s, "t.co", "unknown")
        t["text"] += " " + s
        t["record"]["text"] = t["text"]
        t["hits"] = keyword_hits(t["text"])
        t["urls"] = [s]
        t["targets"] = ["t.co"]
    tw_lines = [json.dumps(t["record"], ensure_ascii=False) for t in all_tweets]

    # facebook
    fb_active = [d for d in DAYS if d != ZERO_DAY]
    fb_per_day = dict(zip(fb_active, allocate(FB_MATCHING, day_weights(fb_active, rng))))
    fb_low_w = [w * rng.lognormvariate(0, 0.35) for w in low_w]
    fb_posts = []
    post_seq = 0
    accounts = [f"page{i:04d}" for i in range(400)]
    for d in DAYS:
        n = fb_per_day.get(d, 0)
        day_posts = []
        for i in range(n):
            share = int(rng.lognormvariate(2.6, 1.2))
            p = {"day": d, "share": share, "targets": []}
            if rng.random() < 0.11:
                p["targets"].append(rng.choice(HIGH))
            elif rng.random() < 0.15:
                p["targets"].append(rng.choice(UNKNOWN))
            if rng.random() < 0.04:
                p["targets"].append(("video", rng.choices(videos, video_w)[0]))
            day_posts.append(p)
        if n:
            # retune a couple of posts to low-credibility so the day's fraction lands near 1.1%
            k = rng.choice([3, 4, 5, 6])
            lows = day_posts[:k]
            others = sum(p["share"] for p in day_posts[k:])
            f = rng.uniform(0.007, 0.015)
            total_low = round(others * f / (1 - f))
            split = allocate(total_low, [rng.random() + 0.1 for _ in lows])
            for p, s in zip(lows, split):
                p["share"] = s
                p["targets"] = [rng.choices(LOW, fb_low_w)[0]] + [x for x in p["targets"] if isinstance(x, tuple)]
                if rng.random() < 0.1:
                    p["targets"].append(rng.choice(HIGH))
            if d == FB_ZERO_SHARE_DAY:
                for p in day_posts:
                    p["share"] = 0
        for p in day_posts:
            p["ts"] = ts(rng, d)
        fb_posts += day_posts
    for _ in range(FB_ROWS - FB_MATCHING):
        d = rng.choice(DAYS)
        tg = [rng.choice(LOW + HIGH + UNKNOWN)] if rng.random() < 0.25 else []
        fb_posts.append({"day": d, "ts": ts(rng, d), "share": int(rng.lognormvariate(2.6, 1.2)),
                         "targets": tg, "negative": True})
    rng.shuffle(fb_posts)
    fb_posts.sort(key=lambda p: p["ts"])
    fb_rows = []
    for p in fb_posts:
        post_seq += 1
        p["id"] = f"fb{post_seq:06d}"
        text = negative_text(rng) if p.get("negative") else positive_text(rng)
        raws = []
        for tgt in p["targets"]:
            if isinstance(tgt, tuple):
                raw = b.video_url(tgt[1])
                b.record_url(raw, "youtube.com" if "youtube" in raw else "youtu.be", "unknown")
            else:
                raw = b.domain_url(tgt)
                b.record_url(raw, tgt, class_of(tgt))
            raws.append(raw)
        link = raws[0] if raws else ""
        msg_urls = raws[1:]
        if raws and rng.random() < 0.15:
            msg_urls = [raws[0]] + msg_urls  # repeated in the message: counted once
        message = " ".join([text] + msg_urls)
        p["urls"] = raws
        p["text"] = message
        p["hits"] = keyword_hits(message)
        assert bool(p["hits"]) != bool(p.get("negative")), message
        share = p["share"]
        share_field = "" if share == 0 and rng.random() < 0.5 else str(share)
        date_field = p["ts"].strftime("%Y-%m-%d %H:%M:%S") if rng.random() < 0.8 else p["ts"].strftime("%Y-%m-%dT%H:%M:%SZ")
        fb_rows.append([date_field, message, link, share_field, rng.choice(accounts), p["id"]])

    # --- write inputs -----------------------------------------------------------
    out.mkdir(parents=True, exist_ok=True)
    golden = out / "golden"
    golden.mkdir(exist_ok=True)

    def write_csv(path, header, rows):
        with open(path, "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)

    (out / "twitter.ndjson").write_text("\n".join(tw_lines) + "\n", encoding="utf-8")
    write_csv(out / "facebook.csv", ["date", "message", "link", "share_count", "account_id", "post_id"], fb_rows)
    (out / "keywords.txt").write_text(
        "# vaccine keywords, one version active for the whole collection\n[2020-12-20]\n"
        + "\n".join(KEYWORDS) + "\n", encoding="utf-8")
    (out / "low.txt").write_text(
        "# low-credibility sources (synthetic list)\n" + "\n".join(sorted(LOW)) + "\n", encoding="utf-8")
    (out / "high.txt").write_text(
        "# high-credibility sources (synthetic list)\n" + "\n".join(sorted(HIGH)) + "\n", encoding="utf-8")
    (out / "high_overlapping.txt").write_text(
        "# corrupted: byoblu.it also appears on the low list\n"
        + "\n".join(sorted(HIGH + ["byoblu.it"])) + "\n", encoding="utf-8")
    write_csv(out / "gazetteer_mini.csv", ["name", "kind", "region_code", "population"],
              [[n, k, c, "" if p is None else p] for n, k, c, p in entries])
    write_csv(out / "redirects.csv", ["short_url", "expanded_url"], b.redirects)

    # doses: a ramp from V-day on, proportional to population
    dose_rows = []
    for d in DAYS:
        for name, code, pop in REGIONS:
            if d < V_DAY:
                continue
            day_n = (d - V_DAY).days
            base = pop / 1e6 * (40 if d == V_DAY else 150 + 120 * day_n)
            dose_rows.append([d.isoformat(), code, int(base * rng.uniform(0.6, 1.4))])
    write_csv(out / "doses.csv", ["date", "region_code", "doses_administered"], dose_rows)

    # video metadata: a quarter of the linked videos are gone
    removed = set(rng.sample(videos[1:], 15))
    meta_rows = []
    for i, v in enumerate(videos):
        if v in removed:
            continue
        title = "Intervista sul vaccino" if v == FEATURED_VIDEO else f"Video {i:02d} sui vaccini"
        views = 1_250_000 if v == FEATURED_VIDEO else rng.randint(200, 400_000)
        meta_rows.append([v, title, f"UC{''.join(rng.choice(YT_ALPHABET) for _ in range(22))}", views])
    write_csv(out / "video_metadata.csv", ["video_id", "title", "channel_id", "view_count"], meta_rows)

    # side fixtures
    side_tw = []
    bad_lines = {137, 512, 988}
    for i in range(1, 1001):
        d = DAYS[i % 30]
        rec = {"id": str(900000 + i), "created_at": ts(rng, d).strftime("%Y-%m-%dT%H:%M:%SZ"),
               "text": positive_text(rng) if i % 3 else negative_text(rng),
               "user": {"id": f"s{i % 97}", "location": rng.choice(["Milano", "", None, "Roma"])}}
        if i == 137:
            line = json.dumps(rec)[:-7]  # truncated
        elif i == 512:
            del rec["created_at"]
            line = json.dumps(rec, ensure_ascii=False)
        elif i == 988:
            rec["id"] = ""
            line = json.dumps(rec, ensure_ascii=False)
        else:
            line = json.dumps(rec, ensure_ascii=False)
        side_tw.append(line)
    (out / "twitter_1000.ndjson").write_text("\n".join(side_tw) + "\n", encoding="utf-8")

    shares = [int(rng.lognormvariate(2.5, 1.0)) for _ in range(500)]
    shares[-1] += 12345 - sum(shares)
    assert shares[-1] >= 0 and sum(shares) == 12345
    side_fb = []
    for i, s in enumerate(shares):
        d = DAYS[i % 30]
        side_fb.append([d.isoformat(), positive_text(rng), "", "" if s == 0 else str(s), f"acct{i % 41}"])
    write_csv(out / "facebook_500.csv", ["date", "message", "link", "share_count", "account_id"], side_fb)

    # synthetic 16k-name gazetteer for benchmarks and index-size checks
    syll = ["ba", "ce", "di", "fo", "gu", "la", "me", "ni", "po", "ru", "sa", "te", "vi", "zo", "ri", "no"]
    names = set()
    big = [[n, k, c, "" if p is None else p] for n, k, c, p in entries]
    seen = {(normalize(n), k) for n, k, _, _ in entries}
    codes = [c for _, c, _ in REGIONS]
    while len(big) < 16000:
        n_words = rng.choice([1, 1, 1, 2, 2, 3])
        name = " ".join("".join(rng.choice(syll) for _ in range(rng.randint(2, 4))).capitalize()
                        for _ in range(n_words))
        kind = "municipality" if rng.random() < 0.93 else "province"
        if (normalize(name), kind) in seen:
            continue
        seen.add((normalize(name), kind))
        names.add(name)
        big.append([name, kind, rng.choice(codes), ""])
    write_csv(out / "gazetteer_16k.csv", ["name", "kind", "region_code", "population"], big)

    # 200 location strings for the longest-match check
    locs = ["Roma, Lazio", "vivo a Paese", "Sesto San Giovanni", "Sesto", "Reggio nell'Emilia",
            "Reggio Calabria", "Forlì-Cesena", "Aosta, Valle d'Aosta", "Milano Roma Napoli",
            "romantica", "", "Trento e Bolzano", "Venezia Giulia", "Friuli-Venezia Giulia, Italia",
            "Emilia", "Paese mio", "Sesto San Giovanni (MI), Lombardia", "  FORLÌ  "]
    pieces = [n for n, _, _, _ in entries] + UNRESOLVED_PARTS + ["vivo a", "da", "tra", "e", "&", "-"]
    while len(locs) < 200:
        locs.append(" ".join(rng.choice(pieces) for _ in range(rng.randint(1, 4))))
    (out / "locations.txt").write_text("\n".join(locs) + "\n", encoding="utf-8")

    # --- oracles ------------------------------------------------------------------
    matching_tw = [t for t in all_tweets if t["hits"]]
    matching_fb = [p for p in fb_posts if p["hits"]]
    assert len(matching_tw) == TW_MATCHING and len(matching_fb) == FB_MATCHING

    write_csv(golden / "keyword_matches.csv", ["platform", "post_id", "keywords"],
              [["twitter", t["id"], "|".join(t["hits"])] for t in all_tweets]
              + [["facebook", p["id"], "|".join(p["hits"])] for p in fb_posts])

    truth = b.url_truth
    write_csv(golden / "urls.csv", ["url", "canonical_domain", "class"],
              [[u, d, c] for u, (d, c) in sorted(truth.items())])

    def classes(post):
        cs = {truth[u][1] for u in post["urls"]}
        return cs

    def domains(post, cls):
        return {truth[u][0] for u in post["urls"] if truth[u][1] == cls}

    daily = []
    frac = {}
    for plat, posts, weight in [("twitter", matching_tw, lambda p: 1), ("facebook", matching_fb, lambda p: p["share"])]:
        vol, low, high = Counter(), Counter(), Counter()
        for p in posts:
            w = weight(p)
            vol[p["day"]] += w
            if "low" in classes(p):
                low[p["day"]] += w
            if "high" in classes(p):
                high[p["day"]] += w
        lf, hf = [], []
        for d in DAYS:
            daily.append([d.isoformat(), plat, vol[d], low[d], high[d]])
            lf.append(low[d] / vol[d] if vol[d] else 0.0)
            hf.append(high[d] / vol[d] if vol[d] else 0.0)
        frac[plat] = {"low": sum(lf) / len(lf), "high": sum(hf) / len(hf)}
    write_csv(golden / "daily.csv", ["date", "platform", "volume", "low_count", "high_count"], daily)

    tally = defaultdict(lambda: [0, 0])
    for i, posts in enumerate([matching_tw, matching_fb]):
        for p in posts:
            w = 1 if i == 0 else p["share"]
            for cls in ("low", "high"):
                for d in domains(p, cls):
                    tally[d][i] += w
    write_csv(golden / "leaderboard.csv", ["domain", "class", "twitter_shares", "facebook_shares"],
              [[d, class_of(d), t[0], t[1]] for d, t in sorted(tally.items())])
    low_total_tw = sum(t[0] for d, t in tally.items() if class_of(d) == "low")
    max_high_tw = max(t[0] for d, t in tally.items() if class_of(d) == "high")
    assert low_total_tw > max_high_tw, (low_total_tw, max_high_tw)
    low_seen = [d for d in sorted(tally) if class_of(d) == "low" and (tally[d][0] or tally[d][1])]
    rho = pearson(mid_ranks([tally[d][0] for d in low_seen]), mid_ranks([tally[d][1] for d in low_seen]))

    # geolocation from each author's latest matching tweet
    latest = {}
    for t in matching_tw:
        uid_ = t["user"]["id"]
        key = (t["ts"], t["id"])
        if uid_ not in latest or key > latest[uid_][0]:
            latest[uid_] = (key, t)
    resolutions = {}
    for uid_, (_, t) in latest.items():
        loc = t["record"]["user"]["location"]
        if loc is None or not loc.strip():
            continue
        hit = resolve(loc.strip(), entries)
        resolutions[uid_] = hit[2] if hit else ""
    write_csv(golden / "users.csv", ["user_id", "region_code"], sorted(resolutions.items()))
    resolved = sum(1 for r in resolutions.values() if r)
    assert len(resolutions) == LOCATED_USERS and resolved == RESOLVED_USERS, (len(resolutions), resolved)

    user_tw = defaultdict(lambda: [0, 0])
    for t in matching_tw:
        user_tw[t["user"]["id"]][1] += 1
        if "low" in classes(t):
            user_tw[t["user"]["id"]][0] += 1
    dose_total = Counter()
    for d, code, n in dose_rows:
        dose_total[code] += n
    region_rows = []
    for name, code, pop in sorted(REGIONS, key=lambda r: r[1]):
        located = [u for u, r in resolutions.items() if r == code]
        fracs = [user_tw[u][0] / user_tw[u][1] for u in located if user_tw[u][1]]
        mean = sum(fracs) / len(fracs) if fracs else None
        assert mean is None or 0.002 <= mean <= 0.005, (code, mean)
        region_rows.append([code, len(located), "" if mean is None else repr(mean), dose_total[code], pop,
                            repr(dose_total[code] * 1e6 / pop)])
    write_csv(golden / "regions.csv", ["region_code", "users_located", "mean_user_low_fraction", "total_doses",
                                       "population", "doses_per_million"], region_rows)
    r_check = pearson([r[1] for r in region_rows], [r[4] for r in region_rows])

    vid_shares = defaultdict(lambda: [0, 0])
    for i, posts in enumerate([matching_tw, matching_fb]):
        for p in posts:
            ids = {tgt[1] for tgt in p["targets"] if isinstance(tgt, tuple)}
            for v in ids:
                vid_shares[v][i] += 1 if i == 0 else p["share"]
    write_csv(golden / "videos.csv", ["video_id", "status", "tweet_shares", "facebook_shares"],
              [[v, "removed" if v in removed else "available", s[0], s[1]] for v, s in sorted(vid_shares.items())])

    locs_golden = []
    for loc in locs:
        hit = resolve(loc, entries)
        locs_golden.append([loc, hit[0] if hit else "", hit[2] if hit else ""])
    write_csv(golden / "locations.csv", ["location", "matched_name", "region_code"], locs_golden)

    summary = {
        "seed": SEED,
        "days": [DAYS[0].isoformat(), DAYS[-1].isoformat()],
        "zero_volume_day": ZERO_DAY.isoformat(),
        "facebook_zero_share_day": FB_ZERO_SHARE_DAY.isoformat(),
        "twitter_records": TW_RECORDS, "twitter_matching": TW_MATCHING,
        "facebook_rows": FB_ROWS, "facebook_matching": FB_MATCHING,
        "side_twitter_records": 1000, "side_twitter_malformed": len(bad_lines),
        "side_facebook_rows": 500, "side_facebook_share_total": 12345,
        "gazetteer_16k_entries": len(big),
        "users_with_location": len(resolutions), "users_geolocated": resolved,
        "users_vs_population_r": r_check,
        "users_vs_population_r_construction": r_users,
        "cross_platform_low_rho": rho, "cross_platform_low_domains": len(low_seen),
        "twitter_low_total": low_total_tw, "twitter_max_high_domain": max_high_tw,
        "mean_daily_fraction": frac,
        "videos_linked": len(vid_shares),
        "videos_removed": sorted(v for v in vid_shares if v in removed),
    }
    (golden / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return summary


if __name__ == "__main__":
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "fixtures"
    s = build(target)
    print(json.dumps({k: s[k] for k in ("mean_daily_fraction", "users_vs_population_r",
                                        "cross_platform_low_rho", "twitter_low_total",
                                        "twitter_max_high_domain", "users_geolocated")}, indent=2))
