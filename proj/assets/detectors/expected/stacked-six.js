// Six techniques stacked on one page.
var Guard = {
  hits: 0,

  // 1. decoy by class
  baitClass: function () {return false;},

  // 2. decoy by id
  baitId: function () {return false;},

  // 3. ad library global
  noGoogletag: function () {return false;},

  // 4. well-known ad script flag
  noAdsJs: function () {return false;},

  // 5. timing of an ad request
  tooFast: function (t0) {return false;},

  // 6. rule injection probe
  hiddenByRule: function () {return false;},

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
