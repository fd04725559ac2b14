// Six techniques stacked on one page.
var Guard = {
  hits: 0,

  // 1. decoy by class
  baitClass: function () {
    var d = document.createElement("div");
    d.className = "adsbox";
    document.body.appendChild(d);
    return d.offsetHeight === 0;
  },

  // 2. decoy by id
  baitId: function () {
    var d = document.createElement("div");
    d.id = "ad-banner";
    document.body.appendChild(d);
    return d.clientHeight === 0;
  },

  // 3. ad library global
  noGoogletag: function () {
    return typeof window.googletag === "undefined";
  },

  // 4. well-known ad script flag
  noAdsJs: function () {
    return window.canRunAds !== true;
  },

  // 5. timing of an ad request
  tooFast: function (t0) {
    return performance.now() - t0 < 3;
  },

  // 6. rule injection probe
  hiddenByRule: function () {
    var d = document.createElement("div");
    d.className = "textAd";
    document.body.appendChild(d);
    return window.getComputedStyle(d).display === "none";
  },

  run: function () {
    var t0 = performance.now();
    if (this.baitClass()) this.hits++;
    if (this.baitId()) this.hits++;
    if (this.noGoogletag()) this.hits++;
    if (this.noAdsJs()) this.hits++;
    if (this.tooFast(t0)) this.hits++;
    if (this.hiddenByRule()) this.hits++;
    if (this.hits > 0) document.body.setAttribute("data-ab", String(this.hits));
  }
};
Guard.run();
