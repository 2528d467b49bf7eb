#!/usr/bin/env python3
"""Generate the bundled miniature ERP dataset under crates/core/data/sample.

The output is deterministic (fixed RNG seed); re-running overwrites the files
byte-for-byte. Values never contain commas or quotes, so the row files can be
line-counted and split naively by tests.
"""

import csv
import os
import random
import sys
from datetime import date, timedelta

OUT = os.path.join(os.path.dirname(__file__), "..", "crates", "core", "data", "sample")
RNG = random.Random(20211101)

# name, description, [(column, domain, nullable)], key columns
CATALOG = []


def table(name, description, columns, keys):
    cols = []
    for c in columns:
        parts = c.split(":")
        cols.append((parts[0], parts[1], len(parts) > 2 and parts[2] == "nullable"))
    CATALOG.append((name, description, cols, keys))


# --- organisational units and configuration --------------------------------
table("T001", "Company codes", ["BUKRS:org-unit", "BUTXT:text", "WAERS:currency"], ["BUKRS"])
table("T001W", "Plants", ["WERKS:org-unit", "NAME1:text", "BUKRS:org-unit"], ["WERKS"])
table("T024", "Purchasing groups", ["EKGRP:org-unit", "EKNAM:text"], ["EKGRP"])
table("T024E", "Purchasing organizations", ["EKORG:org-unit", "EKOTX:text", "BUKRS:org-unit"], ["EKORG"])
table("TVKO", "Sales organizations", ["VKORG:org-unit", "VTEXT:text", "BUKRS:org-unit"], ["VKORG"])
table("T003", "Accounting document types", ["BLART:code", "LTEXT:text"], ["BLART"])

# --- vendor / customer / material master -----------------------------------
table("LFA1", "Vendor master (general)", ["LIFNR:partner-number", "NAME1:text", "LAND1:code", "ERDAT:date"], ["LIFNR"])
table("LFB1", "Vendor master (company code)", ["LIFNR:partner-number", "BUKRS:org-unit", "AKONT:code", "ERDAT:date"], ["LIFNR", "BUKRS"])
table("LFM1", "Vendor master (purchasing org)", ["LIFNR:partner-number", "EKORG:org-unit", "WAERS:currency"], ["LIFNR", "EKORG"])
table("KNA1", "Customer master (general)", ["KUNNR:partner-number", "NAME1:text", "LAND1:code", "ERDAT:date"], ["KUNNR"])
table("KNB1", "Customer master (company code)", ["KUNNR:partner-number", "BUKRS:org-unit", "AKONT:code"], ["KUNNR", "BUKRS"])
table("KNVV", "Customer master (sales area)", ["KUNNR:partner-number", "VKORG:org-unit", "VTWEG:code", "SPART:code"], ["KUNNR", "VKORG", "VTWEG", "SPART"])
table("MARA", "Material master (general)", ["MATNR:material-number", "MTART:code", "MATKL:code", "MEINS:unit", "ERSDA:date"], ["MATNR"])
table("MAKT", "Material descriptions", ["MATNR:material-number", "SPRAS:code", "MAKTX:text"], ["MATNR", "SPRAS"])
table("MARC", "Material plant data", ["MATNR:material-number", "WERKS:org-unit", "DISMM:code"], ["MATNR", "WERKS"])
table("MARD", "Material storage location data", ["MATNR:material-number", "WERKS:org-unit", "LGORT:org-unit", "LABST:quantity"], ["MATNR", "WERKS", "LGORT"])
table("MBEW", "Material valuation", ["MATNR:material-number", "BWKEY:org-unit", "VERPR:amount"], ["MATNR", "BWKEY"])

# --- procure to pay ----------------------------------------------------------
table("EBAN", "Purchase requisitions", ["BANFN:document-number", "BNFPO:item-number", "BSART:code", "MATNR:material-number", "MENGE:quantity", "MEINS:unit", "BADAT:date", "EBELN:document-number:nullable", "EBELP:item-number:nullable"], ["BANFN", "BNFPO"])
table("EBKN", "Purchase requisition account assignment", ["BANFN:document-number", "BNFPO:item-number", "ZEBKN:item-number", "SAKTO:code", "KOSTL:org-unit"], ["BANFN", "BNFPO", "ZEBKN"])
table("EKKO", "Purchase order header", ["EBELN:document-number", "BUKRS:org-unit", "BSTYP:code", "BSART:code", "LIFNR:partner-number", "EKORG:org-unit", "EKGRP:org-unit", "WAERS:currency", "AEDAT:date", "UZEIT:time:nullable", "ERNAM:text"], ["EBELN"])
table("EKPO", "Purchase order items", ["EBELN:document-number", "EBELP:item-number", "MATNR:material-number", "TXZ01:text", "WERKS:org-unit", "MENGE:quantity", "MEINS:unit", "NETPR:amount", "NETWR:amount", "AEDAT:date", "LOEKZ:indicator:nullable"], ["EBELN", "EBELP"])
table("EKPA", "Purchase order partner roles", ["EBELN:document-number", "PARVW:code", "PARZA:item-number", "LIFN2:partner-number"], ["EBELN", "PARVW", "PARZA"])
table("EKET", "Purchase order schedule lines", ["EBELN:document-number", "EBELP:item-number", "ETENR:item-number", "EINDT:date", "MENGE:quantity"], ["EBELN", "EBELP", "ETENR"])
table("EKKN", "Purchase order account assignment", ["EBELN:document-number", "EBELP:item-number", "ZEKKN:item-number", "SAKTO:code", "KOSTL:org-unit"], ["EBELN", "EBELP", "ZEKKN"])
table("EKES", "Vendor confirmations", ["EBELN:document-number", "EBELP:item-number", "ETENS:item-number", "EBTYP:code", "EINDT:date", "ERDAT:date", "UZEIT:time:nullable"], ["EBELN", "EBELP", "ETENS"])
table("EKBE", "Purchase order history", ["EBELN:document-number", "EBELP:item-number", "ZEKKN:item-number", "VGABE:code", "GJAHR:fiscal-year", "BELNR:document-number", "BUZEI:item-number", "BEWTP:code", "BUDAT:date", "CPUDT:date", "CPUTM:time", "MENGE:quantity", "DMBTR:amount"], ["EBELN", "EBELP", "ZEKKN", "VGABE", "GJAHR", "BELNR", "BUZEI"])
table("MKPF", "Material document header", ["MBLNR:document-number", "MJAHR:fiscal-year", "BLART:code", "BUDAT:date", "CPUDT:date", "CPUTM:time", "USNAM:text"], ["MBLNR", "MJAHR"])
table("MSEG", "Material document items", ["MBLNR:document-number", "MJAHR:fiscal-year", "ZEILE:item-number", "BWART:code", "MATNR:material-number", "WERKS:org-unit", "MENGE:quantity", "EBELN:document-number:nullable", "EBELP:item-number:nullable", "AUFNR:document-number:nullable", "BUDAT_MKPF:date", "CPUTM_MKPF:time"], ["MBLNR", "MJAHR", "ZEILE"])
table("RBKP", "Invoice document header", ["BELNR:document-number", "GJAHR:fiscal-year", "BUKRS:org-unit", "LIFNR:partner-number", "EBELN:document-number:nullable", "BLDAT:date", "BUDAT:date", "CPUDT:date", "CPUTM:time", "RMWWR:amount", "WAERS:currency"], ["BELNR", "GJAHR"])
table("RSEG", "Invoice document items", ["BELNR:document-number", "GJAHR:fiscal-year", "BUZEI:item-number", "EBELN:document-number", "EBELP:item-number", "MENGE:quantity", "WRBTR:amount"], ["BELNR", "GJAHR", "BUZEI"])

# --- financial accounting ----------------------------------------------------
table("BKPF", "Accounting document header", ["BUKRS:org-unit", "BELNR:document-number", "GJAHR:fiscal-year", "BLART:code", "BLDAT:date", "BUDAT:date", "CPUDT:date", "CPUTM:time", "AWTYP:code", "AWKEY:document-number", "XBLNR:document-number:nullable"], ["BUKRS", "BELNR", "GJAHR"])
table("BSEG", "Accounting document segments", ["BUKRS:org-unit", "BELNR:document-number", "GJAHR:fiscal-year", "BUZEI:item-number", "KOART:code", "SHKZG:indicator", "DMBTR:amount", "LIFNR:partner-number:nullable", "KUNNR:partner-number:nullable", "EBELN:document-number:nullable", "EBELP:item-number:nullable", "AUGDT:date:nullable", "AUGBL:document-number:nullable"], ["BUKRS", "BELNR", "GJAHR", "BUZEI"])
table("BSIK", "Vendor open items", ["BUKRS:org-unit", "LIFNR:partner-number", "GJAHR:fiscal-year", "BELNR:document-number", "BUZEI:item-number", "BUDAT:date", "DMBTR:amount"], ["BUKRS", "LIFNR", "GJAHR", "BELNR", "BUZEI"])
table("BSAK", "Vendor cleared items", ["BUKRS:org-unit", "LIFNR:partner-number", "GJAHR:fiscal-year", "BELNR:document-number", "BUZEI:item-number", "AUGDT:date", "AUGBL:document-number", "DMBTR:amount"], ["BUKRS", "LIFNR", "GJAHR", "BELNR", "BUZEI"])
table("BSID", "Customer open items", ["BUKRS:org-unit", "KUNNR:partner-number", "GJAHR:fiscal-year", "BELNR:document-number", "BUZEI:item-number", "BUDAT:date", "DMBTR:amount"], ["BUKRS", "KUNNR", "GJAHR", "BELNR", "BUZEI"])
table("BSAD", "Customer cleared items", ["BUKRS:org-unit", "KUNNR:partner-number", "GJAHR:fiscal-year", "BELNR:document-number", "BUZEI:item-number", "AUGDT:date", "AUGBL:document-number", "DMBTR:amount"], ["BUKRS", "KUNNR", "GJAHR", "BELNR", "BUZEI"])

# --- change documents --------------------------------------------------------
table("CDHDR", "Change document header", ["OBJECTCLAS:code", "OBJECTID:document-number", "CHANGENR:document-number", "USERNAME:text", "UDATE:date", "UTIME:time", "TCODE:code"], ["OBJECTCLAS", "OBJECTID", "CHANGENR"])
table("CDPOS", "Change document items", ["OBJECTCLAS:code", "OBJECTID:document-number", "CHANGENR:document-number", "TABNAME:code", "TABKEY:text", "FNAME:code", "CHNGIND:indicator", "VALUE_NEW:text:nullable", "VALUE_OLD:text:nullable"], ["OBJECTCLAS", "OBJECTID", "CHANGENR", "TABNAME", "TABKEY", "FNAME", "CHNGIND"])

# --- order to cash -----------------------------------------------------------
table("VBAK", "Sales document header", ["VBELN:document-number", "AUART:code", "VKORG:org-unit", "KUNNR:partner-number", "ERDAT:date", "ERZET:time", "NETWR:amount", "WAERK:currency"], ["VBELN"])
table("VBAP", "Sales document items", ["VBELN:document-number", "POSNR:item-number", "MATNR:material-number", "KWMENG:quantity", "NETWR:amount", "ERDAT:date"], ["VBELN", "POSNR"])
table("VBEP", "Sales document schedule lines", ["VBELN:document-number", "POSNR:item-number", "ETENR:item-number", "EDATU:date", "WMENG:quantity"], ["VBELN", "POSNR", "ETENR"])
table("VBKD", "Sales document business data", ["VBELN:document-number", "POSNR:item-number", "ZTERM:code"], ["VBELN", "POSNR"])
table("VBPA", "Sales document partners", ["VBELN:document-number", "POSNR:item-number", "PARVW:code", "KUNNR:partner-number"], ["VBELN", "POSNR", "PARVW"])
table("VBUK", "Sales document header status", ["VBELN:document-number", "GBSTK:indicator"], ["VBELN"])
table("VBUP", "Sales document item status", ["VBELN:document-number", "POSNR:item-number", "GBSTA:indicator"], ["VBELN", "POSNR"])
table("VBFA", "Sales document flow", ["VBELV:document-number", "POSNV:item-number", "VBELN:document-number", "POSNN:item-number", "VBTYP_N:code"], ["VBELV", "POSNV", "VBELN", "POSNN"])
table("LIKP", "Delivery header", ["VBELN:document-number", "LFART:code", "KUNNR:partner-number", "ERDAT:date", "ERZET:time", "WADAT_IST:date:nullable"], ["VBELN"])
table("LIPS", "Delivery items", ["VBELN:document-number", "POSNR:item-number", "MATNR:material-number", "LFIMG:quantity", "VGBEL:document-number", "VGPOS:item-number"], ["VBELN", "POSNR"])
table("VBRK", "Billing document header", ["VBELN:document-number", "FKART:code", "KUNRG:partner-number", "FKDAT:date", "ERZET:time", "NETWR:amount"], ["VBELN"])
table("VBRP", "Billing document items", ["VBELN:document-number", "POSNR:item-number", "AUBEL:document-number", "AUPOS:item-number", "FKIMG:quantity", "NETWR:amount"], ["VBELN", "POSNR"])

# --- production --------------------------------------------------------------
table("AUFK", "Order master data", ["AUFNR:document-number", "AUART:code", "WERKS:org-unit", "ERDAT:date", "KTEXT:text"], ["AUFNR"])
table("AFKO", "Production order header", ["AUFNR:document-number", "GSTRP:date", "GLTRP:date", "PLNBEZ:material-number"], ["AUFNR"])
table("AFPO", "Production order items", ["AUFNR:document-number", "POSNR:item-number", "MATNR:material-number", "PSMNG:quantity"], ["AUFNR", "POSNR"])
table("RESB", "Reservations and dependent requirements", ["RSNUM:document-number", "RSPOS:item-number", "AUFNR:document-number", "MATNR:material-number", "BDMNG:quantity"], ["RSNUM", "RSPOS"])

RELATIONSHIPS = [
    # purchase orders
    ("EKPO", "EBELN", "EKKO", "EBELN"),
    ("EKPA", "EBELN", "EKKO", "EBELN"),
    ("EKET", "EBELN|EBELP", "EKPO", "EBELN|EBELP"),
    ("EKKN", "EBELN|EBELP", "EKPO", "EBELN|EBELP"),
    ("EKES", "EBELN|EBELP", "EKPO", "EBELN|EBELP"),
    ("EKPA", "LIFN2", "LFA1", "LIFNR"),
    ("EKKO", "LIFNR", "LFA1", "LIFNR"),
    ("EKKO", "BUKRS", "T001", "BUKRS"),
    ("EKKO", "EKORG", "T024E", "EKORG"),
    ("EKKO", "EKGRP", "T024", "EKGRP"),
    ("EKPO", "WERKS", "T001W", "WERKS"),
    # requisitions
    ("EBAN", "EBELN", "EKKO", "EBELN"),
    ("EBAN", "EBELN|EBELP", "EKPO", "EBELN|EBELP"),
    ("EBKN", "BANFN|BNFPO", "EBAN", "BANFN|BNFPO"),
    ("EBAN", "MATNR", "MARA", "MATNR"),
    # purchase order history, goods and invoice receipts
    ("EKBE", "EBELN", "EKKO", "EBELN"),
    ("EKBE", "EBELN|EBELP", "EKPO", "EBELN|EBELP"),
    ("EKBE", "BELNR|GJAHR", "RBKP", "BELNR|GJAHR"),
    ("EKBE", "BELNR|GJAHR", "MKPF", "MBLNR|MJAHR"),
    ("MSEG", "MBLNR|MJAHR", "MKPF", "MBLNR|MJAHR"),
    ("MSEG", "EBELN|EBELP", "EKPO", "EBELN|EBELP"),
    ("MSEG", "MATNR", "MARA", "MATNR"),
    ("MSEG", "AUFNR", "AUFK", "AUFNR"),
    ("RSEG", "BELNR|GJAHR", "RBKP", "BELNR|GJAHR"),
    ("RSEG", "EBELN|EBELP", "EKPO", "EBELN|EBELP"),
    ("RBKP", "EBELN", "EKKO", "EBELN"),
    ("RBKP", "LIFNR", "LFA1", "LIFNR"),
    # accounting
    ("BKPF", "XBLNR", "EKKO", "EBELN"),
    ("BKPF", "AWKEY", "RBKP", "BELNR"),
    ("BKPF", "AWKEY", "MKPF", "MBLNR"),
    ("BKPF", "AWKEY", "VBRK", "VBELN"),
    ("BKPF", "BLART", "T003", "BLART"),
    ("BKPF", "BUKRS", "T001", "BUKRS"),
    ("BSEG", "BUKRS|BELNR|GJAHR", "BKPF", "BUKRS|BELNR|GJAHR"),
    ("BSEG", "EBELN|EBELP", "EKPO", "EBELN|EBELP"),
    ("BSIK", "BUKRS|BELNR|GJAHR", "BKPF", "BUKRS|BELNR|GJAHR"),
    ("BSAK", "BUKRS|BELNR|GJAHR", "BKPF", "BUKRS|BELNR|GJAHR"),
    ("BSID", "BUKRS|BELNR|GJAHR", "BKPF", "BUKRS|BELNR|GJAHR"),
    ("BSAD", "BUKRS|BELNR|GJAHR", "BKPF", "BUKRS|BELNR|GJAHR"),
    ("BSIK", "LIFNR", "LFA1", "LIFNR"),
    ("BSAK", "LIFNR", "LFA1", "LIFNR"),
    ("BSID", "KUNNR", "KNA1", "KUNNR"),
    ("BSAD", "KUNNR", "KNA1", "KUNNR"),
    # change documents
    ("CDPOS", "OBJECTCLAS|OBJECTID|CHANGENR", "CDHDR", "OBJECTCLAS|OBJECTID|CHANGENR"),
    # master data
    ("LFB1", "LIFNR", "LFA1", "LIFNR"),
    ("LFM1", "LIFNR", "LFA1", "LIFNR"),
    ("KNB1", "KUNNR", "KNA1", "KUNNR"),
    ("KNVV", "KUNNR", "KNA1", "KUNNR"),
    ("MAKT", "MATNR", "MARA", "MATNR"),
    ("MARC", "MATNR", "MARA", "MATNR"),
    ("MARC", "WERKS", "T001W", "WERKS"),
    ("MARD", "MATNR|WERKS", "MARC", "MATNR|WERKS"),
    ("MBEW", "MATNR", "MARA", "MATNR"),
    ("T001W", "BUKRS", "T001", "BUKRS"),
    ("TVKO", "BUKRS", "T001", "BUKRS"),
    # order to cash
    ("VBAP", "VBELN", "VBAK", "VBELN"),
    ("VBEP", "VBELN|POSNR", "VBAP", "VBELN|POSNR"),
    ("VBKD", "VBELN", "VBAK", "VBELN"),
    ("VBPA", "VBELN", "VBAK", "VBELN"),
    ("VBUK", "VBELN", "VBAK", "VBELN"),
    ("VBUP", "VBELN|POSNR", "VBAP", "VBELN|POSNR"),
    ("VBFA", "VBELV", "VBAK", "VBELN"),
    ("VBFA", "VBELN", "LIKP", "VBELN"),
    ("VBFA", "VBELN", "VBRK", "VBELN"),
    ("VBAK", "KUNNR", "KNA1", "KUNNR"),
    ("VBAK", "VKORG", "TVKO", "VKORG"),
    ("VBAP", "MATNR", "MARA", "MATNR"),
    ("LIPS", "VBELN", "LIKP", "VBELN"),
    ("LIPS", "VGBEL|VGPOS", "VBAP", "VBELN|POSNR"),
    ("LIPS", "MATNR", "MARA", "MATNR"),
    ("LIKP", "KUNNR", "KNA1", "KUNNR"),
    ("VBRP", "VBELN", "VBRK", "VBELN"),
    ("VBRP", "AUBEL|AUPOS", "VBAP", "VBELN|POSNR"),
    ("VBRK", "KUNRG", "KNA1", "KUNNR"),
    # production
    ("AFKO", "AUFNR", "AUFK", "AUFNR"),
    ("AFPO", "AUFNR", "AUFK", "AUFNR"),
    ("AFPO", "MATNR", "MARA", "MATNR"),
    ("RESB", "AUFNR", "AUFK", "AUFNR"),
    ("RESB", "MATNR", "MARA", "MATNR"),
    ("AUFK", "WERKS", "T001W", "WERKS"),
]

CLASSES = [
    ("purchase_orders", "Purchase orders", ["EKKO", "EKPO", "EKPA", "EKET", "EKKN"], True),
    ("purchase_requisitions", "Purchase requisitions", ["EBAN", "EBKN"], True),
    ("material_documents", "Material documents", ["MKPF", "MSEG"], False),
    ("supplier_invoices", "Supplier invoices", ["RBKP", "RSEG"], False),
    ("accounting_documents", "Accounting documents", ["BKPF", "BSEG"], False),
    ("sales_orders", "Sales orders", ["VBAK", "VBAP", "VBEP", "VBKD", "VBPA"], True),
    ("deliveries", "Outbound deliveries", ["LIKP", "LIPS"], True),
    ("billing_documents", "Billing documents", ["VBRK", "VBRP"], False),
    ("vendors", "Vendors", ["LFA1", "LFB1", "LFM1"], True),
    ("customers", "Customers", ["KNA1", "KNB1", "KNVV"], False),
    ("materials", "Materials", ["MARA", "MAKT", "MARC", "MARD", "MBEW"], False),
    ("production_orders", "Production orders", ["AUFK", "AFKO", "AFPO", "RESB"], False),
    ("__change_documents__", "Change documents", ["CDHDR", "CDPOS"], False),
]

ROWS = {t[0]: [] for t in CATALOG}


def ymd(d):
    return d.strftime("%Y%m%d")


def hms(rng):
    return "%02d%02d%02d" % (rng.randint(7, 18), rng.randint(0, 59), rng.randint(0, 59))


def add(tbl, **row):
    ROWS[tbl].append(row)


def gen():
    rng = RNG
    bukrs = ["1000", "2000", "3000"]
    for b, name, cur in zip(bukrs, ["Northwind GmbH", "Northwind Inc", "Northwind SRL"], ["EUR", "USD", "EUR"]):
        add("T001", BUKRS=b, BUTXT=name, WAERS=cur)
    plants = [("1000", "Hamburg", "1000"), ("1100", "Berlin", "1000"), ("2000", "Chicago", "2000"), ("3000", "Milano", "3000")]
    for w, n, b in plants:
        add("T001W", WERKS=w, NAME1=n, BUKRS=b)
    for i in range(1, 7):
        add("T024", EKGRP="%03d" % i, EKNAM="Buyer group %d" % i)
    for b in bukrs:
        add("T024E", EKORG=b, EKOTX="Purch org " + b, BUKRS=b)
        add("TVKO", VKORG=b, VTEXT="Sales org " + b, BUKRS=b)
    for blart, text in [("AB", "Clearing"), ("DR", "Customer invoice"), ("DZ", "Customer payment"), ("KR", "Vendor invoice"),
                        ("KZ", "Vendor payment"), ("RE", "Invoice gross"), ("RV", "Billing transfer"), ("SA", "G/L document"),
                        ("WE", "Goods receipt"), ("ZP", "Payment posting")]:
        add("T003", BLART=blart, LTEXT=text)

    vendors = ["%010d" % (100000 + i) for i in range(1, 41)]
    for v in vendors:
        d = date(2019, 1, 1) + timedelta(days=rng.randint(0, 500))
        add("LFA1", LIFNR=v, NAME1="Supplier %s" % v[-3:], LAND1=rng.choice(["DE", "US", "IT", "FR"]), ERDAT=ymd(d))
        add("LFB1", LIFNR=v, BUKRS=rng.choice(bukrs), AKONT="160000", ERDAT=ymd(d))
        add("LFM1", LIFNR=v, EKORG=rng.choice(bukrs), WAERS="EUR")
    customers = ["%010d" % (200000 + i) for i in range(1, 51)]
    for c in customers:
        d = date(2019, 1, 1) + timedelta(days=rng.randint(0, 500))
        add("KNA1", KUNNR=c, NAME1="Customer %s" % c[-3:], LAND1=rng.choice(["DE", "US", "IT", "FR"]), ERDAT=ymd(d))
        add("KNB1", KUNNR=c, BUKRS=rng.choice(bukrs), AKONT="140000")
        add("KNVV", KUNNR=c, VKORG=rng.choice(bukrs), VTWEG="10", SPART="00")
    materials = ["M-%05d" % (10000 + i) for i in range(1, 81)]
    for m in materials:
        d = date(2019, 1, 1) + timedelta(days=rng.randint(0, 400))
        add("MARA", MATNR=m, MTART=rng.choice(["ROH", "HALB", "FERT"]), MATKL="%03d" % rng.randint(1, 20), MEINS="PC", ERSDA=ymd(d))
        add("MAKT", MATNR=m, SPRAS="E", MAKTX="Material %s" % m[2:])
        ws = rng.sample([p[0] for p in plants], rng.choice([1, 1, 2]))
        for w in sorted(ws):
            add("MARC", MATNR=m, WERKS=w, DISMM="PD")
            add("MARD", MATNR=m, WERKS=w, LGORT="0001", LABST=str(rng.randint(0, 500)))
            add("MBEW", MATNR=m, BWKEY=w, VERPR="%.2f" % rng.uniform(1, 200))

    # ---- procure to pay
    belnr_fi = {b: 5100000000 for b in bukrs}
    mblnr = 5000000000
    rbelnr = 5105600000
    banfn = 10000000
    changenr = 1
    for i in range(150):
        ebeln = "%d" % (4500000001 + i)
        b = rng.choice(bukrs)
        lifnr = rng.choice(vendors)
        d = date(2020, 7, 1) + timedelta(days=rng.randint(0, 540))
        uzeit = hms(rng) if rng.random() < 0.85 else ""
        add("EKKO", EBELN=ebeln, BUKRS=b, BSTYP="F", BSART=rng.choice(["NB", "NB", "FO"]), LIFNR=lifnr, EKORG=b,
            EKGRP="%03d" % rng.randint(1, 6), WAERS="EUR", AEDAT=ymd(d), UZEIT=uzeit, ERNAM="BUYER%02d" % rng.randint(1, 9))
        add("EKPA", EBELN=ebeln, PARVW="LF", PARZA="000", LIFN2=lifnr)
        nitems = rng.randint(1, 5)
        items = []
        for j in range(nitems):
            ebelp = "%05d" % ((j + 1) * 10)
            m = rng.choice(materials)
            menge = rng.randint(1, 100)
            netpr = round(rng.uniform(5, 500), 2)
            items.append((ebelp, m, menge, netpr))
            add("EKPO", EBELN=ebeln, EBELP=ebelp, MATNR=m, TXZ01="Material %s" % m[2:], WERKS=rng.choice(plants)[0],
                MENGE=str(menge), MEINS="PC", NETPR="%.2f" % netpr, NETWR="%.2f" % (netpr * menge), AEDAT=ymd(d),
                LOEKZ="L" if rng.random() < 0.03 else "")
            add("EKET", EBELN=ebeln, EBELP=ebelp, ETENR="0001", EINDT=ymd(d + timedelta(days=rng.randint(7, 40))), MENGE=str(menge))
            if rng.random() < 0.25:
                add("EKKN", EBELN=ebeln, EBELP=ebelp, ZEKKN="01", SAKTO="400000", KOSTL="CC%03d" % rng.randint(1, 30))
            if rng.random() < 0.2:
                cd = d + timedelta(days=rng.randint(1, 5))
                add("EKES", EBELN=ebeln, EBELP=ebelp, ETENS="0001", EBTYP="AB", EINDT=ymd(cd + timedelta(days=10)),
                    ERDAT=ymd(cd), UZEIT=hms(rng))
            # requisition preceding most items
            if rng.random() < 0.7:
                banfn += 1
                rd = d - timedelta(days=rng.randint(1, 20))
                add("EBAN", BANFN="%010d" % banfn, BNFPO="00010", BSART="NB", MATNR=m, MENGE=str(menge), MEINS="PC",
                    BADAT=ymd(rd), EBELN=ebeln, EBELP=ebelp)
                if rng.random() < 0.3:
                    add("EBKN", BANFN="%010d" % banfn, BNFPO="00010", ZEBKN="01", SAKTO="400000", KOSTL="CC%03d" % rng.randint(1, 30))
        # goods receipt
        received = rng.random() < 0.9
        gr_date = d + timedelta(days=rng.randint(5, 30))
        if received:
            mblnr += 1
            mj = str(gr_date.year)
            tm = hms(rng)
            add("MKPF", MBLNR=str(mblnr), MJAHR=mj, BLART="WE", BUDAT=ymd(gr_date), CPUDT=ymd(gr_date), CPUTM=tm, USNAM="WH01")
            for z, (ebelp, m, menge, netpr) in enumerate(items):
                add("MSEG", MBLNR=str(mblnr), MJAHR=mj, ZEILE="%04d" % (z + 1), BWART="101", MATNR=m, WERKS=plants[0][0],
                    MENGE=str(menge), EBELN=ebeln, EBELP=ebelp, AUFNR="", BUDAT_MKPF=ymd(gr_date), CPUTM_MKPF=tm)
                add("EKBE", EBELN=ebeln, EBELP=ebelp, ZEKKN="00", VGABE="1", GJAHR=mj, BELNR=str(mblnr), BUZEI="%04d" % (z + 1),
                    BEWTP="E", BUDAT=ymd(gr_date), CPUDT=ymd(gr_date), CPUTM=tm, MENGE=str(menge), DMBTR="%.2f" % (netpr * menge))
            belnr_fi[b] += 1
            add("BKPF", BUKRS=b, BELNR=str(belnr_fi[b]), GJAHR=mj, BLART="WE", BLDAT=ymd(gr_date), BUDAT=ymd(gr_date),
                CPUDT=ymd(gr_date), CPUTM=tm, AWTYP="MKPF", AWKEY=str(mblnr), XBLNR="")
            for z, (ebelp, m, menge, netpr) in enumerate(items):
                add("BSEG", BUKRS=b, BELNR=str(belnr_fi[b]), GJAHR=mj, BUZEI="%03d" % (z + 1), KOART="M", SHKZG="S",
                    DMBTR="%.2f" % (netpr * menge), LIFNR="", KUNNR="", EBELN=ebeln, EBELP=ebelp, AUGDT="", AUGBL="")
        # invoice receipt and payment
        if received and rng.random() < 0.85:
            rbelnr += 1
            inv_date = gr_date + timedelta(days=rng.randint(2, 20))
            gj = str(inv_date.year)
            tm = hms(rng)
            total = sum(netpr * menge for (_, _, menge, netpr) in items)
            add("RBKP", BELNR=str(rbelnr), GJAHR=gj, BUKRS=b, LIFNR=lifnr, EBELN=ebeln, BLDAT=ymd(inv_date), BUDAT=ymd(inv_date),
                CPUDT=ymd(inv_date), CPUTM=tm, RMWWR="%.2f" % total, WAERS="EUR")
            for z, (ebelp, m, menge, netpr) in enumerate(items):
                add("RSEG", BELNR=str(rbelnr), GJAHR=gj, BUZEI="%06d" % (z + 1), EBELN=ebeln, EBELP=ebelp, MENGE=str(menge),
                    WRBTR="%.2f" % (netpr * menge))
                add("EKBE", EBELN=ebeln, EBELP=ebelp, ZEKKN="00", VGABE="2", GJAHR=gj, BELNR=str(rbelnr), BUZEI="%04d" % (z + 1),
                    BEWTP="Q", BUDAT=ymd(inv_date), CPUDT=ymd(inv_date), CPUTM=tm, MENGE=str(menge), DMBTR="%.2f" % (netpr * menge))
            belnr_fi[b] += 1
            inv_doc = str(belnr_fi[b])
            paid = rng.random() < 0.8
            pay_date = inv_date + timedelta(days=rng.randint(10, 45))
            add("BKPF", BUKRS=b, BELNR=inv_doc, GJAHR=gj, BLART="RE", BLDAT=ymd(inv_date), BUDAT=ymd(inv_date), CPUDT=ymd(inv_date),
                CPUTM=tm, AWTYP="RMRP", AWKEY=str(rbelnr), XBLNR=ebeln)
            pay_doc = ""
            if paid:
                belnr_fi[b] += 1
                pay_doc = str(belnr_fi[b])
            add("BSEG", BUKRS=b, BELNR=inv_doc, GJAHR=gj, BUZEI="001", KOART="K", SHKZG="H", DMBTR="%.2f" % total, LIFNR=lifnr,
                KUNNR="", EBELN=ebeln, EBELP=items[0][0], AUGDT=ymd(pay_date) if paid else "", AUGBL=pay_doc)
            for z, (ebelp, m, menge, netpr) in enumerate(items):
                add("BSEG", BUKRS=b, BELNR=inv_doc, GJAHR=gj, BUZEI="%03d" % (z + 2), KOART="S", SHKZG="S",
                    DMBTR="%.2f" % (netpr * menge), LIFNR="", KUNNR="", EBELN=ebeln, EBELP=ebelp, AUGDT="", AUGBL="")
            if paid:
                pt = hms(rng)
                add("BKPF", BUKRS=b, BELNR=pay_doc, GJAHR=str(pay_date.year), BLART="ZP", BLDAT=ymd(pay_date), BUDAT=ymd(pay_date),
                    CPUDT=ymd(pay_date), CPUTM=pt, AWTYP="BKPF", AWKEY=pay_doc, XBLNR=ebeln)
                add("BSEG", BUKRS=b, BELNR=pay_doc, GJAHR=str(pay_date.year), BUZEI="001", KOART="K", SHKZG="S", DMBTR="%.2f" % total,
                    LIFNR=lifnr, KUNNR="", EBELN=ebeln, EBELP=items[0][0], AUGDT=ymd(pay_date), AUGBL=pay_doc)
                add("BSEG", BUKRS=b, BELNR=pay_doc, GJAHR=str(pay_date.year), BUZEI="002", KOART="S", SHKZG="H", DMBTR="%.2f" % total,
                    LIFNR="", KUNNR="", EBELN="", EBELP="", AUGDT="", AUGBL="")
                add("BSAK", BUKRS=b, LIFNR=lifnr, GJAHR=gj, BELNR=inv_doc, BUZEI="001", AUGDT=ymd(pay_date), AUGBL=pay_doc, DMBTR="%.2f" % total)
            else:
                add("BSIK", BUKRS=b, LIFNR=lifnr, GJAHR=gj, BELNR=inv_doc, BUZEI="001", BUDAT=ymd(inv_date), DMBTR="%.2f" % total)
        # change documents on the purchase order
        nchanges = 1 if i == 0 else rng.choice([0, 0, 1, 1, 2])
        for c in range(nchanges):
            cdate = d + timedelta(days=rng.randint(1, 10))
            chg = "%010d" % changenr
            changenr += 1
            add("CDHDR", OBJECTCLAS="purchase_orders", OBJECTID=ebeln, CHANGENR=chg, USERNAME="BUYER%02d" % rng.randint(1, 9),
                UDATE=ymd(cdate), UTIME=hms(rng), TCODE="ME22N")
            if i == 0:
                fields = ["NETPR", "MENGE"]
            else:
                fields = rng.sample(["NETPR", "MENGE", "EINDT", "LOEKZ"], rng.randint(1, 2))
            for f in fields:
                ebelp, m, menge, netpr = items[0]
                old = {"NETPR": "%.2f" % netpr, "MENGE": str(menge), "EINDT": ymd(d), "LOEKZ": ""}[f]
                new = {"NETPR": "%.2f" % (netpr * 1.05), "MENGE": str(menge + 5), "EINDT": ymd(d + timedelta(days=7)), "LOEKZ": "L"}[f]
                add("CDPOS", OBJECTCLAS="purchase_orders", OBJECTID=ebeln, CHANGENR=chg, TABNAME="EKPO",
                    TABKEY=ebeln + ebelp, FNAME=f, CHNGIND="U", VALUE_NEW=new, VALUE_OLD=old)

    # requisition-only changes
    for r in ROWS["EBAN"][::9]:
        chg = "%010d" % changenr
        changenr += 1
        cdate = date(int(r["BADAT"][:4]), int(r["BADAT"][4:6]), int(r["BADAT"][6:])) + timedelta(days=1)
        add("CDHDR", OBJECTCLAS="purchase_requisitions", OBJECTID=r["BANFN"], CHANGENR=chg, USERNAME="REQ01", UDATE=ymd(cdate),
            UTIME=hms(rng), TCODE="ME52N")
        add("CDPOS", OBJECTCLAS="purchase_requisitions", OBJECTID=r["BANFN"], CHANGENR=chg, TABNAME="EBAN", TABKEY=r["BANFN"] + r["BNFPO"],
            FNAME="MENGE", CHNGIND="U", VALUE_NEW=str(int(r["MENGE"]) + 1), VALUE_OLD=r["MENGE"])
    # unconverted requisitions
    for k in range(60):
        banfn += 1
        rd = date(2021, 1, 1) + timedelta(days=rng.randint(0, 500))
        add("EBAN", BANFN="%010d" % banfn, BNFPO="00010", BSART="NB", MATNR=rng.choice(materials), MENGE=str(rng.randint(1, 50)),
            MEINS="PC", BADAT=ymd(rd), EBELN="", EBELP="")

    # ---- production orders
    aufnrs = []
    rsnum = 1000
    for i in range(60):
        aufnr = "%012d" % (1000000 + i)
        aufnrs.append(aufnr)
        d = date(2020, 9, 1) + timedelta(days=rng.randint(0, 500))
        m = rng.choice(materials)
        add("AUFK", AUFNR=aufnr, AUART="PP01", WERKS=rng.choice(plants)[0], ERDAT=ymd(d), KTEXT="Production of %s" % m)
        add("AFKO", AUFNR=aufnr, GSTRP=ymd(d + timedelta(days=2)), GLTRP=ymd(d + timedelta(days=9)), PLNBEZ=m)
        add("AFPO", AUFNR=aufnr, POSNR="0001", MATNR=m, PSMNG=str(rng.randint(10, 200)))
        rsnum += 1
        comps = rng.sample(materials, rng.randint(2, 5))
        mblnr += 1
        tm = hms(rng)
        gi = d + timedelta(days=3)
        add("MKPF", MBLNR=str(mblnr), MJAHR=str(gi.year), BLART="WA", BUDAT=ymd(gi), CPUDT=ymd(gi), CPUTM=tm, USNAM="PROD01")
        for z, c in enumerate(comps):
            q = rng.randint(1, 40)
            add("RESB", RSNUM="%010d" % rsnum, RSPOS="%04d" % (z + 1), AUFNR=aufnr, MATNR=c, BDMNG=str(q))
            add("MSEG", MBLNR=str(mblnr), MJAHR=str(gi.year), ZEILE="%04d" % (z + 1), BWART="261", MATNR=c, WERKS=plants[0][0],
                MENGE=str(q), EBELN="", EBELP="", AUFNR=aufnr, BUDAT_MKPF=ymd(gi), CPUTM_MKPF=tm)

    # ---- order to cash
    deliv = 80000000
    bill = 90000000
    for i in range(150):
        vbeln = "%010d" % (10001 + i)
        d = date(2020, 7, 1) + timedelta(days=rng.randint(0, 540))
        kunnr = rng.choice(customers)
        vkorg = rng.choice(bukrs)
        nitems = rng.randint(1, 4)
        items = []
        for j in range(nitems):
            posnr = "%06d" % ((j + 1) * 10)
            m = rng.choice(materials)
            q = rng.randint(1, 60)
            net = round(rng.uniform(10, 800) * q, 2)
            items.append((posnr, m, q, net))
        total = sum(x[3] for x in items)
        add("VBAK", VBELN=vbeln, AUART="OR", VKORG=vkorg, KUNNR=kunnr, ERDAT=ymd(d), ERZET=hms(rng), NETWR="%.2f" % total, WAERK="EUR")
        add("VBKD", VBELN=vbeln, POSNR="000000", ZTERM="NT30")
        add("VBPA", VBELN=vbeln, POSNR="000000", PARVW="AG", KUNNR=kunnr)
        add("VBPA", VBELN=vbeln, POSNR="000000", PARVW="WE", KUNNR=kunnr)
        done = rng.random() < 0.8
        add("VBUK", VBELN=vbeln, GBSTK="C" if done else "A")
        for posnr, m, q, net in items:
            add("VBAP", VBELN=vbeln, POSNR=posnr, MATNR=m, KWMENG=str(q), NETWR="%.2f" % net, ERDAT=ymd(d))
            add("VBEP", VBELN=vbeln, POSNR=posnr, ETENR="0001", EDATU=ymd(d + timedelta(days=10)), WMENG=str(q))
            add("VBUP", VBELN=vbeln, POSNR=posnr, GBSTA="C" if done else "A")
        if rng.random() < 0.3:
            chg = "%010d" % changenr
            changenr += 1
            add("CDHDR", OBJECTCLAS="sales_orders", OBJECTID=vbeln, CHANGENR=chg, USERNAME="SALES01",
                UDATE=ymd(d + timedelta(days=1)), UTIME=hms(rng), TCODE="VA02")
            add("CDPOS", OBJECTCLAS="sales_orders", OBJECTID=vbeln, CHANGENR=chg, TABNAME="VBAP", TABKEY=vbeln + items[0][0],
                FNAME="KWMENG", CHNGIND="U", VALUE_NEW=str(items[0][2] + 1), VALUE_OLD=str(items[0][2]))
        if not done:
            continue
        deliv += 1
        dv = "%010d" % deliv
        dd = d + timedelta(days=rng.randint(3, 15))
        add("LIKP", VBELN=dv, LFART="LF", KUNNR=kunnr, ERDAT=ymd(dd), ERZET=hms(rng), WADAT_IST=ymd(dd + timedelta(days=1)))
        mblnr += 1
        tm = hms(rng)
        gi = dd + timedelta(days=1)
        add("MKPF", MBLNR=str(mblnr), MJAHR=str(gi.year), BLART="WL", BUDAT=ymd(gi), CPUDT=ymd(gi), CPUTM=tm, USNAM="WH02")
        for z, (posnr, m, q, net) in enumerate(items):
            add("LIPS", VBELN=dv, POSNR=posnr, MATNR=m, LFIMG=str(q), VGBEL=vbeln, VGPOS=posnr)
            add("VBFA", VBELV=vbeln, POSNV=posnr, VBELN=dv, POSNN=posnr, VBTYP_N="J")
            add("MSEG", MBLNR=str(mblnr), MJAHR=str(gi.year), ZEILE="%04d" % (z + 1), BWART="601", MATNR=m, WERKS=plants[0][0],
                MENGE=str(q), EBELN="", EBELP="", AUFNR="", BUDAT_MKPF=ymd(gi), CPUTM_MKPF=tm)
        bill += 1
        bv = "%010d" % bill
        bd = gi + timedelta(days=rng.randint(0, 5))
        add("VBRK", VBELN=bv, FKART="F2", KUNRG=kunnr, FKDAT=ymd(bd), ERZET=hms(rng), NETWR="%.2f" % total)
        for posnr, m, q, net in items:
            add("VBRP", VBELN=bv, POSNR=posnr, AUBEL=vbeln, AUPOS=posnr, FKIMG=str(q), NETWR="%.2f" % net)
            add("VBFA", VBELV=vbeln, POSNV=posnr, VBELN=bv, POSNN=posnr, VBTYP_N="M")
        b = rng.choice(bukrs)
        belnr_fi[b] += 1
        doc = str(belnr_fi[b])
        gj = str(bd.year)
        add("BKPF", BUKRS=b, BELNR=doc, GJAHR=gj, BLART="RV", BLDAT=ymd(bd), BUDAT=ymd(bd), CPUDT=ymd(bd), CPUTM=hms(rng),
            AWTYP="VBRK", AWKEY=bv, XBLNR="")
        add("BSEG", BUKRS=b, BELNR=doc, GJAHR=gj, BUZEI="001", KOART="D", SHKZG="S", DMBTR="%.2f" % total, LIFNR="", KUNNR=kunnr,
            EBELN="", EBELP="", AUGDT="", AUGBL="")
        add("BSEG", BUKRS=b, BELNR=doc, GJAHR=gj, BUZEI="002", KOART="S", SHKZG="H", DMBTR="%.2f" % total, LIFNR="", KUNNR="",
            EBELN="", EBELP="", AUGDT="", AUGBL="")
        if rng.random() < 0.7:
            pd = bd + timedelta(days=rng.randint(10, 40))
            belnr_fi[b] += 1
            pdoc = str(belnr_fi[b])
            add("BKPF", BUKRS=b, BELNR=pdoc, GJAHR=str(pd.year), BLART="DZ", BLDAT=ymd(pd), BUDAT=ymd(pd), CPUDT=ymd(pd), CPUTM=hms(rng),
                AWTYP="BKPF", AWKEY=pdoc, XBLNR="")
            add("BSEG", BUKRS=b, BELNR=pdoc, GJAHR=str(pd.year), BUZEI="001", KOART="D", SHKZG="H", DMBTR="%.2f" % total, LIFNR="",
                KUNNR=kunnr, EBELN="", EBELP="", AUGDT=ymd(pd), AUGBL=pdoc)
            add("BSAD", BUKRS=b, KUNNR=kunnr, GJAHR=gj, BELNR=doc, BUZEI="001", AUGDT=ymd(pd), AUGBL=pdoc, DMBTR="%.2f" % total)
        else:
            add("BSID", BUKRS=b, KUNNR=kunnr, GJAHR=gj, BELNR=doc, BUZEI="001", BUDAT=ymd(bd), DMBTR="%.2f" % total)


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow(r)


def main():
    gen()
    os.makedirs(os.path.join(OUT, "rows"), exist_ok=True)
    write_csv(os.path.join(OUT, "catalog.csv"), ["name", "description", "columns", "key_columns"],
              [(n, d, "|".join("%s:%s%s" % (c, dom, ":nullable" if nl else "") for c, dom, nl in cols), "|".join(keys))
               for n, d, cols, keys in CATALOG])
    write_csv(os.path.join(OUT, "relationships.csv"), ["from_table", "from_columns", "to_table", "to_columns"], RELATIONSHIPS)
    write_csv(os.path.join(OUT, "classes.csv"), ["class_id", "label", "member_tables", "change_tracked"],
              [(c, l, "|".join(m), "true" if t else "false") for c, l, m, t in CLASSES])
    total = 0
    for n, _, cols, keys in CATALOG:
        names = [c for c, _, _ in cols]
        rows = ROWS[n]
        seen = set()
        for r in rows:
            k = tuple(r[c] for c in keys)
            assert all(k), (n, k)
            assert k not in seen, (n, k)
            seen.add(k)
        for r in rows:
            assert set(r) == set(names), (n, set(r) ^ set(names))
            for v in r.values():
                assert "," not in v and '"' not in v and "\n" not in v, (n, v)
        write_csv(os.path.join(OUT, "rows", n + ".csv"), names, [[r[c] for c in names] for r in rows])
        total += len(rows)
    print("tables=%d rows=%d" % (len(CATALOG), total), file=sys.stderr)


if __name__ == "__main__":
    main()
