import csv
from datetime import date

REF = date(2019, 5, 31)

BUSINESS_HEADER = ["id", "name", "latitude", "longitude", "categories", "rating"]
POST_HEADER = ["id", "business_id", "timestamp", "latitude", "longitude", "category"]

BIZ = [
    ["b1", "Sample Name", "40.7150", "-73.9843", "ramen|hot_wings", "4.5"],
    ["b2", "Joe's Pizza-Bar", "40.7638", "-73.9918", "pizza", ""],
    ["b3", "Empty Place", "40.7265", "-73.9815", "sushi", "3.0"],
]


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path
