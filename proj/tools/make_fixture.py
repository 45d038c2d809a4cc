#!/usr/bin/env python3
"""Regenerate data/fixture/history.jsonl and the html/ cache.

Usage: tools/make_fixture.py [fixture-dir]
"""
import hashlib
import json
import pathlib
import sys

# (url, title in the export or None, visits, last visit us, cached <title> or None, cached description or None)
PAGES = [
    ("http://www.technologyreview.com/news/can-apple-do-it-again-with-the-iwatch/",
     "Can Apple do it again with the iWatch Technology", 4, 1361190000000000,
     None, "Wearable computing may be the next category Apple tries to reinvent."),
    ("http://www.macrumors.com/2013/02/14/apple-fights-back-against-iphone-ruling-in-brazil/",
     "Apple fights back against iPhone ruling in Brazil report", 3, 1360850000000000, None, None),
    ("http://appleinsider.com/articles/13/02/13/apples-ownership-of-iphone-name-in-brazil-in-peril",
     "Apples ownership of iPhone name in Brazil in peril App", 2, 1360760000000000, None, None),
    ("http://news.cnet.com/apple-loses-iphone-trademark-in-brazil/",
     "Apple loses iPhone trademark in Brazil report Apple C", 5, 1360940000000000,
     None, "A Brazilian court rules that a local company owns the name in that country."),
    ("http://www.macrumors.com/2013/02/20/apple-suppliers-tsmc-and-foxconn-adding-jobs/",
     "Apple suppliers TSMC and Foxconn adding 5K jobs each", 6, 1361370000000000, None, None),
    ("http://www.forbes.com/sites/will-apples-itv-actually-be-samsungs-smarttv/",
     "Will Apples iTV Actually Be Samsungs SmartTV Forbes", 7, 1361450000000000, None, None),
    ("http://tech.fortune.cnn.com/2013/02/19/apple-supply-chain-alarm-bells/",
     "Apple supply chain alarm bells Apple 20 Fortune Tech", 8, 1361280000000000,
     None, "Analysts see weaker orders for iPhone components heading into the spring."),
    ("http://www.webmd.com/vitamins-supplements/ingredientmono-apple.aspx",
     "APPLE Uses Side Effects Interactions and Warnings W", 9, 1361540000000000,
     None, "Learn more about apple uses, effectiveness, side effects and dosage as part of a balanced diet."),
    ("http://www.healthdiaries.com/apple-fruit-nutrition-facts.html",
     "Apple fruit nutrition facts and health benefits", 12, 1361620000000000,
     None, "Calories, fibre and the vitamin content of a medium apple."),
    ("http://www.care2.com/greenliving/8-health-benefits-of-apples.html",
     "8 Health Benefits Of Apples", 10, 1361710000000000,
     None, "An apple a day really can keep the doctor away."),
    ("http://en.wikipedia.org/wiki/Apple",
     None, 11, 1361800000000000,
     "Apple Fruit", "The apple is the pomaceous fruit of the apple tree, species Malus domestica."),
    ("http://www.fool.com/investing/a-year-after-apple-announced-its-dividend-timing-could-be-better.aspx",
     "a-year-after-apple-announced-its-dividend-timing-cou", 1, 1361880000000000, None, None),
    ("http://arstechnica.com/apple/2013/03/apple-tvs-new-smaller-a5-processor/",
     "Apple TV's new smaller A5 processor could be quietly", 13, 1362150000000000,
     None, "The die shrink points to cheaper iOS hardware later this year."),
    ("http://www.zdnet.com/apple-finally-flips-switch-on-https-by-default-in-app-store/",
     "Apple finally flips switch on HTTPS by default in App S", 14, 1362230000000000,
     None, "Connections to the App Store inside iTunes are now encrypted end to end."),
    ("http://www.cnet.com/apple-vs-samsung-round-2-to-proceed-in-california-court/",
     "Apple vs Samsung Round 2 to proceed in California co", 15, 1362320000000000, None, None),
    ("http://tech.fortune.cnn.com/2013/02/26/sell-google-buy-apple/",
     "Sell Google buy Apple Apple 20 Fortune Tech", 16, 1361880000000000,
     None, "One fund manager argues iPad and iPhone margins are being underestimated."),
    ("http://www.businessinsider.com/apples-suppliers-had-a-terrible-february-2013-3",
     "Apples Suppliers Had A Terrible February Business Inc", 17, 1362410000000000,
     None, "Monthly sales at Foxconn and other assemblers fell sharply."),
    ("http://www.goupstate.com/article/spartanburg-district-7-board-agrees-to-plan-for-laptops",
     "Spartanburg District 7 board agrees to plan for laptop", 2, 1362500000000000,
     None, "The school board approved a plan to give laptops to every high school student."),
    ("http://www.ibtimes.com/macbook-pro-2013-release-date-june-10-apples-wwdc",
     "Macbook Pro 2013 release date June 10 at Apples WV", 18, 1362580000000000, None, None),
    ("http://www.idownloadblog.com/2013/03/05/2013-macbook-air-retina-black-leaked/",
     None, 19, 1362670000000000,
     "2013 MacBook Air Retina In Black Leaked Release Da", None),
    ("http://www.iclarified.com/27602/apple-to-update-the-macbook-pro",
     "iClarified Apple News Apple to Update the MacBook Pr", 20, 1362760000000000, None, None),
    ("http://sidhtech.com/nexus-4-vs-galaxy-s3-vs-iphone-5-the-3-kings/",
     "Nexus 4 vs Galaxy S3 vs iPhone 5 The 3 Kings SidhTe", 21, 1362850000000000, None, None),
    ("http://www.gsmarena.com/apple_iphone_5_vs_iphone_4s_longterm_durability_test.php",
     "Apple iPhone 5 vs iPhone 4S longterm durability test G", 22, 1362940000000000, None, None),
    ("http://www.theguardian.com/technology/2013/mar/is-17-a-month-for-a-three-year-old-iphone-4-still-a-good-deal",
     "Is £17 a month for a threeyearold iPhone 4 still a goo", 23, 1363030000000000, None, None),
    ("http://www.forbes.com/sites/camera-wars-apples-iphone-5-goes-head-to-head/",
     "Camera Wars Apples iPhone 5 Goes Head To Head Ag", 24, 1363120000000000, None, None),
    ("http://www.engadget.com/2013/05/09/aio-wireless-launches-prepaid-iphone-5-plans/",
     "Aio Wireless launches prepaid iPhone 5 plans starting at 55 per month", 25, 1368110000000000,
     None,
     "Thursday saw the launch of a new prepaid wireless carrier as Aio a subsidiary of ATampT "
     "went live offering Apples iPhone 5 and service for 55 per month"),
    ("http://www.businessinsider.com/apple-cuts-ipad-estimates-digitimes-2013-3",
     "Apple Cuts iPad Estimates DigiTimes Business Insider", 26, 1363210000000000, None, None),
    ("http://www.businessinsider.com/supply-chain-indicators-point-to-poor-february-for-apple-2013-3",
     "Supply Chain Indicators Point to Poor February for Ap", 27, 1363300000000000,
     None, "Component orders suggest soft demand for the iPhone and iPad last month."),
]


def html_page(title, description):
    head = []
    if title is not None:
        head.append(f"<title>{title}</title>")
    head.append('<meta charset="utf-8">')
    if description is not None:
        head.append(f'<meta content="{description}" name="Description">')
    return "<!DOCTYPE html>\n<html><head>\n" + "\n".join(head) + "\n</head><body><p>cached copy</p></body></html>\n"


def main():
    root = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else pathlib.Path(__file__).parent.parent / "data" / "fixture")
    html = root / "html"
    html.mkdir(parents=True, exist_ok=True)
    for old in html.glob("*.html"):
        old.unlink()
    lines = []
    for url, title, visits, last, cached_title, cached_desc in PAGES:
        record = {"url": url}
        if title is not None:
            record["title"] = title
        record["visit_count"] = visits
        record["last_visit_us"] = last
        lines.append(json.dumps(record, ensure_ascii=False))
        if cached_title is not None or cached_desc is not None:
            name = hashlib.sha256(url.encode()).hexdigest() + ".html"
            (html / name).write_text(html_page(cached_title, cached_desc), encoding="utf-8")
    (root / "history.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
