// Modeled on the public BlockAdBlock bait check.
var AdCheck = function (options) {
  this._options = { checkOnLoad: true, loopCheckTime: 50, loopMaxNumber: 5 };
  this._var = { bait: null, checking: false, loop: null, loopNumber: 0, event: { detected: [], notDetected: [] } };
};

AdCheck.prototype._creatBait = function () {
  var bait = document.createElement("div");
  bait.setAttribute("class", "pub_300x250 pub_300x250m pub_728x90 text-ad textAd text_ad text_ads text-ads adsbox");
  bait.setAttribute("style", "width: 1px !important; height: 1px !important; position: absolute !important; left: -10000px !important;");
  this._var.bait = window.document.body.appendChild(bait);
};

AdCheck.prototype._checkBait = function (loop) {return false;};

AdCheck.prototype.check = function () {
  if (this._checkBait(false)) {
    this.emitEvent(true);
  } else {
    this.emitEvent(false);
  }
};
